//! Expanded Laurent-polynomial normal form used by `simplify`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Func, Node, Rational, ScalarExpr};

/// Sorted atom/exponent pairs; exponents are never zero.
pub(crate) type Monomial = Vec<(ScalarExpr, i64)>;

#[derive(Debug, Clone, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

fn merge(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let e = a[i].1 + b[j].1;
                if e != 0 {
                    out.push((a[i].0.clone(), e));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn rat_pow(c: &BigRational, k: i64) -> BigRational {
    if k >= 0 {
        num_traits::pow(c.clone(), k as usize)
    } else {
        num_traits::pow(c.recip(), k.unsigned_abs() as usize)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Vec::new(), c);
        p
    }

    fn one() -> Self {
        Self::constant(BigRational::one())
    }

    fn atom(e: ScalarExpr) -> Self {
        Self::monomial(BigRational::one(), vec![(e, 1)])
    }

    fn monomial(c: BigRational, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, c);
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn add(mut self, other: Poly) -> Poly {
        if self.terms.len() < other.terms.len() {
            return other.add(self);
        }
        for (m, c) in other.terms {
            self.add_term(m, c);
        }
        self
    }

    fn scale(mut self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        for v in self.terms.values_mut() {
            *v *= c;
        }
        self
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(merge(ma, mb), ca * cb);
            }
        }
        out
    }

    fn pow(&self, k: u64) -> Poly {
        if k == 0 {
            return Poly::one();
        }
        if let Some((m, c)) = self.as_monomial() {
            let k = k as i64;
            let m = m.iter().map(|(a, e)| (a.clone(), e * k)).collect();
            return Poly::monomial(rat_pow(c, k), m);
        }
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self^(-k)` for `k > 0`.
    fn inverse_pow(&self, k: u64) -> Poly {
        let k = k as i64;
        if self.terms.is_empty() {
            // Division by an exact zero stays in the tree and fails at evaluation.
            return Poly::monomial(BigRational::one(), vec![(ScalarExpr::zero(), -k)]);
        }
        if let Some((m, c)) = self.as_monomial() {
            let mut out = Poly::constant(rat_pow(c, -k));
            for (a, e) in m {
                let e = -e * k;
                if e > 0 && a.is_zero_const() {
                    return Poly::zero();
                }
                let factor = if e > 0 && matches!(a.node(), Node::Add(_)) {
                    // Inverse of an inverse sum: expand the sum again.
                    Poly::from_expr(a).pow(e as u64)
                } else {
                    Poly::monomial(BigRational::one(), vec![(a.clone(), e)])
                };
                out = out.mul(&factor);
            }
            return out;
        }
        // Irreducible sum: normalise so the leading coefficient is one and
        // keep it as an atom.
        let reduced = self.clone().reduce_inverses();
        if reduced.terms.len() != self.terms.len() || reduced.as_monomial().is_some() {
            return reduced.inverse_pow(k as u64);
        }
        let (_, lead) = self.terms.iter().next().unwrap();
        let lead = lead.clone();
        let primitive = self.clone().scale(&lead.recip());
        let atom = primitive.into_expr();
        Poly::monomial(rat_pow(&lead, -k), vec![(atom, -k)])
    }

    pub fn as_monomial(&self) -> Option<(&Monomial, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn from_expr(e: &ScalarExpr) -> Poly {
        match e.node() {
            Node::Const(r) => Poly::constant(r.value().clone()),
            Node::Pi | Node::Coord(_) | Node::Param(_) => Poly::atom(e.clone()),
            Node::Func(f, args) => {
                if e.is_canonical() {
                    Poly::atom(e.clone())
                } else {
                    simplify_func(*f, args)
                }
            }
            Node::Neg(a) => Poly::from_expr(a).scale(&-BigRational::one()),
            Node::Add(v) => v
                .iter()
                .map(Poly::from_expr)
                .fold(Poly::zero(), Poly::add),
            Node::Mul(v) => {
                let mut acc = Poly::one();
                for f in v {
                    acc = acc.mul(&Poly::from_expr(f));
                    if acc.terms.is_empty() {
                        break;
                    }
                }
                acc
            }
            Node::Div(a, b) => Poly::from_expr(a).mul(&Poly::from_expr(b).inverse_pow(1)),
            Node::Pow(b, k) => {
                if e.is_canonical() && *k < 0 {
                    return Poly::monomial(BigRational::one(), vec![(b.clone(), *k)]);
                }
                if e.is_canonical() && !matches!(b.node(), Node::Add(_)) {
                    return Poly::monomial(BigRational::one(), vec![(b.clone(), *k)]);
                }
                let pb = Poly::from_expr(b);
                match k.cmp(&0) {
                    std::cmp::Ordering::Equal => Poly::one(),
                    std::cmp::Ordering::Greater => pb.pow(*k as u64),
                    std::cmp::Ordering::Less => pb.inverse_pow(k.unsigned_abs()),
                }
            }
        }
    }

    pub fn into_expr(self) -> ScalarExpr {
        let mut terms: Vec<ScalarExpr> = self
            .reduce_inverses()
            .terms
            .into_iter()
            .map(|(m, c)| term_expr(c, m))
            .collect();
        match terms.len() {
            0 => ScalarExpr::zero(),
            1 => terms.pop().unwrap(),
            _ => ScalarExpr::canonical(Node::Add(terms)),
        }
    }
}

/// Graded order key of a monomial restricted to `vars`; `None` when some
/// variable has a negative exponent.
fn grade(m: &Monomial, vars: &[ScalarExpr]) -> Option<(i64, Vec<i64>)> {
    let mut v = vec![0i64; vars.len()];
    for (a, e) in m {
        if let Ok(i) = vars.binary_search(a) {
            if *e < 0 {
                return None;
            }
            v[i] = *e;
        }
    }
    Some((v.iter().sum(), v))
}

const REDUCTION_STEPS: usize = 20_000;

impl Poly {
    /// Rewrites every group `P * S^-k` as `(P mod S) * S^-k + (P div S) * S^(1-k)`
    /// for each inverted sum `S`, so that `S * S^-1` collapses to one.
    ///
    /// The remainder of division by a single polynomial under a monomial
    /// order is unique, which keeps the normal form canonical for one inverted
    /// sum at a time.
    fn reduce_inverses(mut self) -> Poly {
        for _ in 0..4 {
            let mut inverted: Vec<ScalarExpr> = self
                .terms
                .keys()
                .flat_map(|m| m.iter())
                .filter(|(a, e)| *e < 0 && matches!(a.node(), Node::Add(_)))
                .map(|(a, _)| a.clone())
                .collect();
            inverted.sort();
            inverted.dedup();
            let mut changed = false;
            for w in inverted {
                if let Some(p) = self.reduce_by(&w) {
                    self = p;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self
    }

    fn reduce_by(&self, w: &ScalarExpr) -> Option<Poly> {
        let s = Poly::from_expr(w);
        if s.terms.len() < 2 {
            return None;
        }
        let mut vars: Vec<ScalarExpr> = Vec::new();
        for m in s.terms.keys() {
            for (a, e) in m {
                if *e < 0 {
                    return None;
                }
                vars.push(a.clone());
            }
        }
        vars.sort();
        vars.dedup();
        let (lead_m, lead_c) = s
            .terms
            .iter()
            .max_by(|a, b| grade(a.0, &vars).cmp(&grade(b.0, &vars)))
            .map(|(m, c)| (m.clone(), c.clone()))?;
        let lead_inv: Monomial = lead_m.iter().map(|(a, e)| (a.clone(), -e)).collect();
        let divides = |m: &Monomial| {
            lead_m.iter().all(|(a, e)| {
                m.iter()
                    .find(|(b, _)| b == a)
                    .is_some_and(|(_, f)| f >= e)
            })
        };

        let mut groups: BTreeMap<i64, Poly> = BTreeMap::new();
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            match m.iter().position(|(a, _)| a == w) {
                Some(i) if m[i].1 < 0 => {
                    let mut m2 = m.clone();
                    let (_, e) = m2.remove(i);
                    groups.entry(e).or_default().add_term(m2, c.clone());
                }
                _ => rest.add_term(m.clone(), c.clone()),
            }
        }
        let mut changed = false;
        let mut steps = 0;
        let mut out = rest;
        while let Some((e, mut g)) = groups.pop_first() {
            let mut quotient = Poly::zero();
            loop {
                let cand = g
                    .terms
                    .iter()
                    .filter(|(m, _)| divides(m))
                    .filter_map(|(m, c)| Some((grade(m, &vars)?, m, c)))
                    .max_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(b.1)));
                let Some((_, m, c)) = cand else { break };
                steps += 1;
                if steps > REDUCTION_STEPS {
                    return None;
                }
                let q_m = merge(m, &lead_inv);
                let q_c = c / &lead_c;
                let sub = s.mul(&Poly::monomial(-q_c.clone(), q_m.clone()));
                g = g.add(sub);
                quotient.add_term(q_m, q_c);
            }
            if !quotient.terms.is_empty() {
                changed = true;
                if e + 1 == 0 {
                    out = out.add(quotient);
                } else {
                    let slot = groups.entry(e + 1).or_default();
                    *slot = std::mem::take(slot).add(quotient);
                }
            }
            let factor = Poly::monomial(BigRational::one(), vec![(w.clone(), e)]);
            out = out.add(g.mul(&factor));
        }
        changed.then_some(out)
    }
}

fn term_expr(c: BigRational, m: Monomial) -> ScalarExpr {
    let mut factors: Vec<ScalarExpr> = Vec::with_capacity(m.len() + 1);
    let unit = c.is_one();
    if m.is_empty() {
        return ScalarExpr::constant(Rational::new(c));
    }
    if !unit {
        factors.push(ScalarExpr::constant(Rational::new(c)));
    }
    for (a, e) in m {
        if e == 1 {
            factors.push(a);
        } else {
            factors.push(ScalarExpr::canonical(Node::Pow(a, e)));
        }
    }
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        ScalarExpr::canonical(Node::Mul(factors))
    }
}

fn exact_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| BigRational::new(n, d))
}

fn simplify_func(f: Func, args: &[ScalarExpr]) -> Poly {
    let polys: Vec<Poly> = args.iter().map(Poly::from_expr).collect();
    let consts: Vec<Option<BigRational>> = polys.iter().map(Poly::as_constant).collect();
    let zero = BigRational::zero();
    let folded = match (f, consts.as_slice()) {
        (Func::Sin, [Some(c)]) if c.is_zero() => Some(zero.clone()),
        (Func::Cos, [Some(c)]) if c.is_zero() => Some(BigRational::one()),
        (Func::Exp, [Some(c)]) if c.is_zero() => Some(BigRational::one()),
        (Func::Ln, [Some(c)]) if c.is_one() => Some(zero.clone()),
        (Func::Sqrt, [Some(c)]) => exact_sqrt(c),
        (Func::Atan2, [Some(a), Some(b)]) if a.is_zero() && b.is_positive() => Some(zero.clone()),
        _ => None,
    };
    if let Some(c) = folded {
        return Poly::constant(c);
    }
    if f == Func::Sqrt && consts[0].is_none() {
        // sqrt(c*P) = sqrt(c)*sqrt(P) for c > 0 so that rescaled arguments
        // share one atom.
        let arg = polys[0].clone().reduce_inverses();
        let lead = arg.terms.values().next().cloned().unwrap_or_default();
        if lead.is_positive() && !lead.is_one() {
            let inner = arg.scale(&lead.recip()).into_expr();
            let root = ScalarExpr::canonical(Node::Func(Func::Sqrt, vec![inner]));
            let factor = match exact_sqrt(&lead) {
                Some(r) => Poly::constant(r),
                None => Poly::atom(ScalarExpr::canonical(Node::Func(
                    Func::Sqrt,
                    vec![ScalarExpr::constant(Rational::new(lead))],
                ))),
            };
            return factor.mul(&Poly::atom(root));
        }
    }
    let args = polys.into_iter().map(Poly::into_expr).collect();
    Poly::atom(ScalarExpr::canonical(Node::Func(f, args)))
}
