use std::fmt;

use num_traits::{One, Signed};

use super::{Node, Rational, ScalarExpr};
use crate::chart::Chart;

/// Formats an expression with the coordinate names of a chart. The output
/// is accepted by [`parse_expr`](super::parse_expr) for the same chart.
pub struct ExprDisplay<'a> {
    expr: &'a ScalarExpr,
    names: Option<&'a [String]>,
}

impl ScalarExpr {
    pub fn display<'a>(&'a self, chart: &'a Chart) -> ExprDisplay<'a> {
        ExprDisplay {
            expr: self,
            names: Some(chart.names()),
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, None, f, 0)
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self.expr, self.names, f, 0)
    }
}

fn const_prec(r: &Rational) -> u8 {
    if r.is_negative() {
        3
    } else if !r.is_integer() {
        2
    } else {
        5
    }
}

fn prec(e: &ScalarExpr) -> u8 {
    match e.node() {
        Node::Add(_) => 1,
        Node::Mul(_) | Node::Div(..) => 2,
        Node::Neg(_) => 3,
        Node::Pow(..) => 4,
        Node::Const(r) => const_prec(r),
        Node::Pi | Node::Coord(_) | Node::Param(_) | Node::Func(..) => 5,
    }
}

fn write_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let v = r.value();
    if v.is_integer() {
        write!(f, "{}", v.numer())
    } else {
        write!(f, "{}/{}", v.numer(), v.denom())
    }
}

/// Splits off a leading minus sign for pretty subtraction.
fn negated(e: &ScalarExpr) -> Option<ScalarExpr> {
    match e.node() {
        Node::Neg(a) => Some(a.clone()),
        Node::Const(r) if r.is_negative() => Some(ScalarExpr::constant(Rational::new(-r.value().clone()))),
        Node::Mul(v) => {
            let c = v.first()?.as_const()?;
            if !c.is_negative() {
                return None;
            }
            let abs = Rational::new(c.value().abs());
            let mut rest: Vec<ScalarExpr> = v[1..].to_vec();
            if !abs.is_one() {
                rest.insert(0, ScalarExpr::constant(abs));
            }
            Some(if rest.len() == 1 {
                rest.pop().unwrap()
            } else {
                ScalarExpr::raw(Node::Mul(rest))
            })
        }
        _ => None,
    }
}

fn write_expr(
    e: &ScalarExpr,
    names: Option<&[String]>,
    f: &mut fmt::Formatter<'_>,
    min: u8,
) -> fmt::Result {
    let paren = prec(e) < min;
    if paren {
        f.write_str("(")?;
    }
    match e.node() {
        Node::Const(r) => write_rational(r, f)?,
        Node::Pi => f.write_str("pi")?,
        Node::Coord(k) => match names.and_then(|n| n.get(*k)) {
            Some(name) => f.write_str(name)?,
            None => write!(f, "x{k}")?,
        },
        Node::Param(p) => f.write_str(p)?,
        Node::Func(func, args) => {
            write!(f, "{}(", func.name())?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write_expr(a, names, f, 0)?;
            }
            f.write_str(")")?;
        }
        Node::Neg(a) => {
            f.write_str("-")?;
            write_expr(a, names, f, 3)?;
        }
        Node::Add(terms) => {
            for (i, t) in terms.iter().enumerate() {
                if i == 0 {
                    write_expr(t, names, f, 1)?;
                } else if let Some(pos) = negated(t) {
                    f.write_str(" - ")?;
                    write_expr(&pos, names, f, 2)?;
                } else {
                    f.write_str(" + ")?;
                    write_expr(t, names, f, 2)?;
                }
            }
        }
        Node::Mul(factors) => {
            let mut factors = &factors[..];
            if factors.len() > 1 && factors[0].as_const().is_some_and(|c| c.value() == &-num_rational::BigRational::one()) {
                f.write_str("-")?;
                factors = &factors[1..];
            }
            for (i, t) in factors.iter().enumerate() {
                if i > 0 {
                    f.write_str("*")?;
                }
                write_expr(t, names, f, if i == 0 { 2 } else { 3 })?;
            }
        }
        Node::Div(a, b) => {
            write_expr(a, names, f, 2)?;
            f.write_str("/")?;
            write_expr(b, names, f, 3)?;
        }
        Node::Pow(b, k) => {
            write_expr(b, names, f, 5)?;
            write!(f, "^{k}")?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}
