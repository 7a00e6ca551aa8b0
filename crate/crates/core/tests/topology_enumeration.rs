//! Both continuity definitions against brute force, on every topology
//! pair and every map for ground sets of up to three points.

use cartan::finite_topology::{is_continuous, is_continuous_via_closure, FiniteTopology, Ground, PointMap, Subset};
use cartan_testkit::topology::{all_maps, all_topologies, continuous};

fn build(n: usize, opens: &[u32]) -> FiniteTopology {
    let g = Ground::new((0..n).map(|i| format!("p{i}"))).unwrap();
    FiniteTopology::new(g, opens.iter().map(|&b| Subset(b)).collect()).unwrap()
}

#[test]
fn topology_counts() {
    // Number of labelled topologies: 1, 4, 29, 355.
    let counts: Vec<usize> = (1..=4).map(|n| all_topologies(n).len()).collect();
    assert_eq!(counts, [1, 4, 29, 355]);
}

#[test]
fn definitions_agree_exhaustively() {
    for n in 1..=3 {
        for m in 1..=3 {
            let sources = all_topologies(n);
            let targets = all_topologies(m);
            let maps = all_maps(n, m);
            for s in &sources {
                let ts = build(n, s);
                for t in &targets {
                    let tt = build(m, t);
                    for f in &maps {
                        let pm = PointMap::new(f.clone(), m).unwrap();
                        let a = is_continuous(&pm, &ts, &tt).unwrap().is_continuous();
                        let b = is_continuous_via_closure(&pm, &ts, &tt).unwrap();
                        assert_eq!(a, continuous(f, s, t));
                        assert_eq!(a, b, "n={n} m={m} {s:?} {t:?} {f:?}");
                    }
                }
            }
        }
    }
}
