//! Normal form against an independent polynomial expansion, and the
//! parser against the printer.

use cartan::{parse_expr, Chart, ScalarExpr};
use cartan_testkit::poly::{Poly, Tree};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn from_poly(p: &Poly) -> ScalarExpr {
    ScalarExpr::sum(
        p.terms
            .iter()
            .map(|(e, c)| {
                let mut f = vec![ScalarExpr::int(*c as i64)];
                f.extend(e.iter().enumerate().map(|(k, &n)| ScalarExpr::coord(k).powi(n as i64)));
                ScalarExpr::product(f)
            })
            .collect(),
    )
}

#[test]
fn expansion_agrees_with_the_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chart = Chart::spacetime();
    let names = ["x", "y", "z", "t"];
    for _ in 0..200 {
        let a = Tree::random(&mut rng, 4, 4);
        let b = Tree::random(&mut rng, 4, 3);
        let (pa, pb) = (a.expand(4), b.expand(4));
        let ea = a.to_expr().simplify();
        assert!((&ea - &from_poly(&pa)).simplify().is_zero_const());
        let diff = (a.to_expr() - b.to_expr()).simplify();
        assert_eq!(diff.is_zero_const(), pa == pb);
        let parsed = parse_expr(&a.to_text(&names), &chart).unwrap().simplify();
        assert_eq!(parsed, ea);
    }
}

#[test]
fn textbook_identity() {
    let c = Chart::spacetime();
    let e = parse_expr("(x^2 - y^2) - (x - y)*(x + y)", &c).unwrap();
    assert!(e.simplify().is_zero_const());
}
