//! Brute-force finite topology: every family of subsets is tested for the
//! axioms directly, and continuity by inspecting every preimage.

/// All topologies on `n` points, as sorted lists of bitmask open sets.
pub fn all_topologies(n: usize) -> Vec<Vec<u32>> {
    let full = (1u32 << n) - 1;
    // Candidate opens other than the empty set and the whole set.
    let middle: Vec<u32> = (1..full).collect();
    let mut out = Vec::new();
    for pick in 0u64..(1u64 << middle.len()) {
        let mut family = vec![0, full];
        family.extend(middle.iter().enumerate().filter(|(i, _)| pick >> i & 1 == 1).map(|(_, s)| *s));
        let closed = family.iter().all(|a| {
            family
                .iter()
                .all(|b| family.contains(&(a | b)) && family.contains(&(a & b)))
        });
        if closed {
            family.sort_unstable();
            out.push(family);
        }
    }
    out
}

/// All maps `{0..n} -> {0..m}`.
pub fn all_maps(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..m).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn preimage(map: &[usize], set: u32) -> u32 {
    map.iter()
        .enumerate()
        .filter(|(_, &y)| set >> y & 1 == 1)
        .fold(0, |acc, (x, _)| acc | 1 << x)
}

pub fn continuous(map: &[usize], source: &[u32], target: &[u32]) -> bool {
    target.iter().all(|&u| source.contains(&preimage(map, u)))
}
