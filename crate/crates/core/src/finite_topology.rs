//! Point-set topology on small finite ground sets.
//!
//! Subsets are bitmasks over the ground set, so every check is exhaustive.
//! Ground sets are capped at [`MAX_POINTS`] points.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_POINTS: usize = 16;

/// A subset of a ground set of at most [`MAX_POINTS`] points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(n: usize) -> Self {
        Subset(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn singleton(i: usize) -> Self {
        Subset(1 << i)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    /// Complement within a ground set of `n` points.
    pub fn complement(self, n: usize) -> Self {
        Subset(!self.0 & Self::full(n).0)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..32).filter(move |&i| self.contains(i))
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset(iter.into_iter().fold(0, |m, i| m | 1 << i))
    }
}

/// Named points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ground {
    points: Vec<String>,
}

impl Ground {
    pub fn new<I, S>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let points: Vec<String> = points.into_iter().map(Into::into).collect();
        if points.len() > MAX_POINTS {
            return Err(Error::Usage(format!(
                "ground set has {} points, at most {MAX_POINTS} are supported",
                points.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p.as_str()) {
                return Err(Error::Usage(format!("duplicate point `{p}`")));
            }
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| Error::Usage(format!("unknown point `{name}`")))
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.len())
    }

    pub fn subset<I, S>(&self, names: I) -> Result<Subset>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| self.index_of(n.as_ref()))
            .collect::<Result<Subset>>()
    }

    pub fn names(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.points[i].clone()).collect()
    }

    /// `{a,b}` style rendering.
    pub fn show(&self, s: Subset) -> String {
        format!("{{{}}}", self.names(s).join(","))
    }
}

/// Why a family of subsets fails to be a topology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopologyDefect {
    MissingEmpty,
    MissingGround,
    UnionNotOpen { a: Subset, b: Subset, missing: Subset },
    IntersectionNotOpen { a: Subset, b: Subset, missing: Subset },
}

impl TopologyDefect {
    pub fn describe(&self, ground: &Ground) -> String {
        match self {
            TopologyDefect::MissingEmpty => "the empty set is not open".into(),
            TopologyDefect::MissingGround => "the ground set is not open".into(),
            TopologyDefect::UnionNotOpen { a, b, missing } => format!(
                "{} u {} = {} is not open",
                ground.show(*a),
                ground.show(*b),
                ground.show(*missing)
            ),
            TopologyDefect::IntersectionNotOpen { a, b, missing } => format!(
                "{} n {} = {} is not open",
                ground.show(*a),
                ground.show(*b),
                ground.show(*missing)
            ),
        }
    }
}

/// Check the axioms; `Ok(())` or the first defect found. Pairwise closure
/// suffices on a finite family.
pub fn check_topology(n: usize, opens: &[Subset]) -> std::result::Result<(), TopologyDefect> {
    let set: BTreeSet<Subset> = opens.iter().copied().collect();
    if !set.contains(&Subset::EMPTY) {
        return Err(TopologyDefect::MissingEmpty);
    }
    if !set.contains(&Subset::full(n)) {
        return Err(TopologyDefect::MissingGround);
    }
    for (i, &a) in opens.iter().enumerate() {
        for &b in &opens[i + 1..] {
            let u = a.union(b);
            if !set.contains(&u) {
                return Err(TopologyDefect::UnionNotOpen { a, b, missing: u });
            }
            let m = a.intersection(b);
            if !set.contains(&m) {
                return Err(TopologyDefect::IntersectionNotOpen { a, b, missing: m });
            }
        }
    }
    Ok(())
}

/// A validated topology. Open sets keep the order in which they were given
/// (duplicates dropped) so witnesses are reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteTopology {
    ground: Ground,
    opens: Vec<Subset>,
}

impl FiniteTopology {
    pub fn new(ground: Ground, opens: Vec<Subset>) -> Result<Self> {
        let full = ground.full();
        let mut seen = BTreeSet::new();
        let mut kept = Vec::new();
        for s in opens {
            if !s.is_subset_of(full) {
                return Err(Error::Usage("open set is not a subset of the ground set".into()));
            }
            if seen.insert(s) {
                kept.push(s);
            }
        }
        check_topology(ground.len(), &kept)
            .map_err(|d| Error::Usage(format!("not a topology: {}", d.describe(&ground))))?;
        Ok(Self { ground, opens: kept })
    }

    /// Build from point names and lists of point names.
    pub fn from_names<S: AsRef<str>>(points: &[S], opens: &[Vec<S>]) -> Result<Self> {
        let ground = Ground::new(points.iter().map(|s| s.as_ref().to_string()))?;
        let sets = opens
            .iter()
            .map(|o| ground.subset(o.iter()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ground, sets)
    }

    pub fn discrete(ground: Ground) -> Self {
        let opens = (0..=ground.full().0).map(Subset).collect();
        Self { ground, opens }
    }

    pub fn indiscrete(ground: Ground) -> Self {
        let opens = if ground.is_empty() {
            vec![Subset::EMPTY]
        } else {
            vec![ground.full(), Subset::EMPTY]
        };
        Self { ground, opens }
    }

    pub fn ground(&self) -> &Ground {
        &self.ground
    }

    pub fn opens(&self) -> &[Subset] {
        &self.opens
    }

    pub fn is_open(&self, s: Subset) -> bool {
        self.opens.contains(&s)
    }

    pub fn is_closed(&self, s: Subset) -> bool {
        self.is_open(s.complement(self.ground.len()))
    }

    pub fn closed_sets(&self) -> Vec<Subset> {
        let n = self.ground.len();
        self.opens.iter().map(|o| o.complement(n)).collect()
    }

    /// Smallest closed set containing `s`.
    pub fn closure(&self, s: Subset) -> Subset {
        let n = self.ground.len();
        self.opens
            .iter()
            .map(|o| o.complement(n))
            .filter(|c| s.is_subset_of(*c))
            .fold(self.ground.full(), Subset::intersection)
    }

    /// Largest open set inside `s`.
    pub fn interior(&self, s: Subset) -> Subset {
        self.opens
            .iter()
            .filter(|o| o.is_subset_of(s))
            .fold(Subset::EMPTY, |a, b| a.union(*b))
    }

    pub fn sorted_opens(&self) -> BTreeSet<Subset> {
        self.opens.iter().copied().collect()
    }
}

impl fmt::Display for FiniteTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.opens.iter().map(|s| self.ground.show(*s)).collect();
        write!(f, "[{}]", sets.join(", "))
    }
}

/// Name-level validation used by the CLI: verdict plus a readable defect.
pub fn is_topology<S: AsRef<str>>(ground: &[S], sets: &[Vec<S>]) -> Result<Option<String>> {
    let g = Ground::new(ground.iter().map(|s| s.as_ref().to_string()))?;
    let subsets = sets
        .iter()
        .map(|o| g.subset(o.iter()))
        .collect::<Result<Vec<_>>>()?;
    let mut unique = Vec::new();
    for s in subsets {
        if !unique.contains(&s) {
            unique.push(s);
        }
    }
    Ok(check_topology(g.len(), &unique).err().map(|d| d.describe(&g)))
}

/// A total function between two ground sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointMap {
    image: Vec<usize>,
    target_len: usize,
}

impl PointMap {
    pub fn new(image: Vec<usize>, target_len: usize) -> Result<Self> {
        if let Some(bad) = image.iter().find(|&&i| i >= target_len) {
            return Err(Error::Usage(format!("image index {bad} outside target")));
        }
        Ok(Self { image, target_len })
    }

    /// From `(source, target)` name pairs; every source point must appear once.
    pub fn from_pairs<S: AsRef<str>>(from: &Ground, to: &Ground, pairs: &[(S, S)]) -> Result<Self> {
        let mut image = vec![None; from.len()];
        for (a, b) in pairs {
            let i = from.index_of(a.as_ref())?;
            let j = to.index_of(b.as_ref())?;
            if image[i].replace(j).is_some() {
                return Err(Error::Usage(format!("point `{}` mapped twice", a.as_ref())));
            }
        }
        let image = image
            .into_iter()
            .enumerate()
            .map(|(i, j)| j.ok_or_else(|| Error::Usage(format!("point `{}` has no image", from.points()[i]))))
            .collect::<Result<_>>()?;
        Self::new(image, to.len())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
            target_len: n,
        }
    }

    pub fn constant(n: usize, target: usize, target_len: usize) -> Self {
        Self {
            image: vec![target; n],
            target_len,
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.image
    }

    pub fn image_of(&self, s: Subset) -> Subset {
        s.iter().map(|i| self.image[i]).collect()
    }

    pub fn preimage(&self, s: Subset) -> Subset {
        (0..self.image.len()).filter(|&i| s.contains(self.image[i])).collect()
    }

    pub fn is_bijective(&self) -> bool {
        self.image.len() == self.target_len
            && self.image.iter().collect::<BTreeSet<_>>().len() == self.target_len
    }

    pub fn inverse(&self) -> Option<PointMap> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.target_len];
        for (i, &j) in self.image.iter().enumerate() {
            inv[j] = i;
        }
        Some(PointMap {
            image: inv,
            target_len: self.image.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Continuity {
    Continuous,
    /// An open set of the target whose preimage is not open in the source.
    Discontinuous { open_set: Subset, preimage: Subset },
}

impl Continuity {
    pub fn is_continuous(&self) -> bool {
        matches!(self, Continuity::Continuous)
    }
}

fn check_shapes(f: &PointMap, t1: &FiniteTopology, t2: &FiniteTopology) -> Result<()> {
    if f.image.len() != t1.ground.len() || f.target_len != t2.ground.len() {
        return Err(Error::Usage("map does not match the ground sets".into()));
    }
    Ok(())
}

/// Inverse images of open sets are open.
pub fn is_continuous(f: &PointMap, t1: &FiniteTopology, t2: &FiniteTopology) -> Result<Continuity> {
    check_shapes(f, t1, t2)?;
    for &o in &t2.opens {
        let pre = f.preimage(o);
        if !t1.is_open(pre) {
            return Ok(Continuity::Discontinuous {
                open_set: o,
                preimage: pre,
            });
        }
    }
    Ok(Continuity::Continuous)
}

/// `f(cl S) c cl f(S)` for every subset `S` of the source.
pub fn is_continuous_via_closure(f: &PointMap, t1: &FiniteTopology, t2: &FiniteTopology) -> Result<bool> {
    check_shapes(f, t1, t2)?;
    let full = t1.ground.full().0;
    for bits in 0..=full {
        let s = Subset(bits);
        if !f.image_of(t1.closure(s)).is_subset_of(t2.closure(f.image_of(s))) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Bijective and continuous in both directions.
pub fn is_homeomorphism(f: &PointMap, t1: &FiniteTopology, t2: &FiniteTopology) -> Result<bool> {
    check_shapes(f, t1, t2)?;
    let Some(inv) = f.inverse() else {
        return Ok(false);
    };
    Ok(is_continuous(f, t1, t2)?.is_continuous() && is_continuous(&inv, t2, t1)?.is_continuous())
}

/// Images of the open sets of `t1` under `f`, as a family on `target`.
pub fn image_family(f: &PointMap, t1: &FiniteTopology) -> BTreeSet<Subset> {
    t1.opens.iter().map(|o| f.image_of(*o)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The initial and final topologies of the worked example.
    fn figure_one() -> (FiniteTopology, FiniteTopology) {
        let t1 = FiniteTopology::from_names(
            &["a", "b", "c", "d"],
            &[vec!["a", "b", "c", "d"], vec![], vec!["a"], vec!["a", "b"], vec!["a", "b", "c"]],
        )
        .unwrap();
        let t2 = FiniteTopology::from_names(
            &["x", "y", "z", "t"],
            &[
                vec!["x", "y", "z", "t"],
                vec![],
                vec!["x"],
                vec!["y"],
                vec!["x", "y"],
                vec!["y", "z", "t"],
            ],
        )
        .unwrap();
        (t1, t2)
    }

    #[test]
    fn topology_validation() {
        assert_eq!(
            is_topology(&["a", "b", "c", "d"], &[vec!["a", "b", "c", "d"], vec![], vec!["a"], vec!["a", "b"], vec!["a", "b", "c"]]).unwrap(),
            None
        );
        let g = Ground::new(["a", "b", "c"]).unwrap();
        let d = FiniteTopology::discrete(g.clone());
        assert_eq!(check_topology(3, d.opens()), Ok(()));
        let bad = vec![g.full(), Subset::EMPTY, g.subset(["a"]).unwrap(), g.subset(["b"]).unwrap()];
        assert_eq!(
            check_topology(3, &bad),
            Err(TopologyDefect::UnionNotOpen {
                a: g.subset(["a"]).unwrap(),
                b: g.subset(["b"]).unwrap(),
                missing: g.subset(["a", "b"]).unwrap(),
            })
        );
        assert!(is_topology(&["a"], &[vec!["a"]]).unwrap().unwrap().contains("empty"));
        assert!(is_topology(&["a"], &[vec!["q"]]).is_err());
    }

    #[test]
    fn closures() {
        let (t1, _) = figure_one();
        let g = t1.ground().clone();
        assert_eq!(t1.closure(g.subset(["a"]).unwrap()), g.full());
        assert_eq!(t1.closure(Subset::EMPTY), Subset::EMPTY);
        for c in t1.closed_sets() {
            assert_eq!(t1.closure(c), c);
        }
        assert_eq!(t1.closure(g.subset(["c"]).unwrap()), g.subset(["c", "d"]).unwrap());
    }

    #[test]
    fn figure_one_forward_map_for_each_admissible_image_of_d() {
        let (t1, t2) = figure_one();
        for d in ["z", "t"] {
            let f = PointMap::from_pairs(t1.ground(), t2.ground(), &[("a", "y"), ("b", "z"), ("c", "t"), ("d", d)]).unwrap();
            assert!(is_continuous(&f, &t1, &t2).unwrap().is_continuous());
            assert!(is_continuous_via_closure(&f, &t1, &t2).unwrap());
        }
        // Sending d to y makes {y} pull back to {a,d}.
        let f = PointMap::from_pairs(t1.ground(), t2.ground(), &[("a", "y"), ("b", "z"), ("c", "t"), ("d", "y")]).unwrap();
        let v = is_continuous(&f, &t1, &t2).unwrap();
        assert_eq!(
            v,
            Continuity::Discontinuous {
                open_set: t2.ground().subset(["y"]).unwrap(),
                preimage: t1.ground().subset(["a", "d"]).unwrap(),
            }
        );
    }

    #[test]
    fn figure_one_inverse_is_discontinuous() {
        let (t1, t2) = figure_one();
        for x in ["a", "b", "c", "d"] {
            for t in ["c", "d"] {
                let g = PointMap::from_pairs(t2.ground(), t1.ground(), &[("x", x), ("y", "a"), ("z", "b"), ("t", t)]).unwrap();
                match is_continuous(&g, &t2, &t1).unwrap() {
                    Continuity::Discontinuous { open_set, .. } => {
                        assert_eq!(open_set, t1.ground().subset(["a", "b"]).unwrap())
                    }
                    Continuity::Continuous => panic!("inverse reported continuous"),
                }
                assert!(!is_continuous_via_closure(&g, &t2, &t1).unwrap());
            }
        }
    }

    #[test]
    fn identity_and_constant_maps() {
        let (t1, t2) = figure_one();
        assert!(is_continuous(&PointMap::identity(4), &t1, &t1).unwrap().is_continuous());
        assert!(is_homeomorphism(&PointMap::identity(4), &t2, &t2).unwrap());
        let c = PointMap::constant(4, 2, 4);
        assert!(is_continuous_via_closure(&c, &t1, &t2).unwrap());
        assert!(!is_homeomorphism(&c, &t1, &t2).unwrap());
    }

    #[test]
    fn ground_cap() {
        let names: Vec<String> = (0..17).map(|i| format!("p{i}")).collect();
        assert!(matches!(Ground::new(names), Err(Error::Usage(_))));
    }
}
