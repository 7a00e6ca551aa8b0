use super::{Func, Node, ScalarExpr};

/// Raw (unsimplified) partial derivative with respect to coordinate `k`.
pub(super) fn derivative(e: &ScalarExpr, k: usize) -> ScalarExpr {
    match e.node() {
        Node::Const(_) | Node::Pi | Node::Param(_) => ScalarExpr::zero(),
        Node::Coord(j) => ScalarExpr::int(i64::from(*j == k)),
        Node::Neg(a) => nonzero(derivative(a, k)).map_or_else(ScalarExpr::zero, ScalarExpr::neg),
        Node::Add(v) => ScalarExpr::sum(v.iter().filter_map(|t| nonzero(derivative(t, k))).collect()),
        Node::Mul(v) => {
            let mut terms = Vec::new();
            for (i, f) in v.iter().enumerate() {
                if let Some(df) = nonzero(derivative(f, k)) {
                    let mut factors = v.clone();
                    factors[i] = df;
                    terms.push(ScalarExpr::product(factors));
                }
            }
            ScalarExpr::sum(terms)
        }
        Node::Div(a, b) => {
            let da = derivative(a, k);
            let db = derivative(b, k);
            let inv = b.powi(-1);
            let first = da * &inv;
            match nonzero(db) {
                None => first,
                Some(db) => first - a * db * b.powi(-2),
            }
        }
        Node::Pow(b, n) => match nonzero(derivative(b, k)) {
            None => ScalarExpr::zero(),
            Some(db) => ScalarExpr::product(vec![ScalarExpr::int(*n), b.powi(n - 1), db]),
        },
        Node::Func(f, args) => {
            if let Func::Atan2 = f {
                let (a, b) = (&args[0], &args[1]);
                let da = derivative(a, k);
                let db = derivative(b, k);
                if da.is_zero_const() && db.is_zero_const() {
                    return ScalarExpr::zero();
                }
                let den = (a * a + b * b).powi(-1);
                return (b * da - a * db) * den;
            }
            let u = &args[0];
            let Some(du) = nonzero(derivative(u, k)) else {
                return ScalarExpr::zero();
            };
            let outer = match f {
                Func::Sin => u.cos(),
                Func::Cos => -u.sin(),
                Func::Exp => e.clone(),
                Func::Ln => u.powi(-1),
                Func::Sqrt => ScalarExpr::ratio(1, 2) * e.powi(-1),
                Func::Atan2 => unreachable!(),
            };
            outer * du
        }
    }
}

fn nonzero(e: ScalarExpr) -> Option<ScalarExpr> {
    (!e.is_zero_const()).then_some(e)
}
