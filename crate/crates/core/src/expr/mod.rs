//! Immutable symbolic scalar expressions over chart coordinates and named
//! parameters.
//!
//! A [`ScalarExpr`] is a shared, immutable tree. Trees built through the
//! constructors and operators are *raw*: they keep quotient and negation
//! nodes exactly as written. [`ScalarExpr::simplify`] maps any tree to a
//! canonical form: a sum of monomials with exact rational coefficients over
//! *atoms* (coordinates, parameters, `pi`, function applications with
//! canonical arguments, and inverses of irreducible sums). Products over sums
//! are expanded, like terms collected, and `x^0 = 1`; no trigonometric or
//! logarithmic identities are applied.
//!
//! Because differentiation acts on that normal form as a derivation of a free
//! Laurent-polynomial ring, mixed partials agree syntactically after
//! simplification. Identities such as `d(dω) = 0` therefore come out as an
//! exact zero, not as a small number.

mod diff;
mod display;
mod eval;
mod normal;
mod parse;
mod zero;

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{BoundExpr, CompiledExpr, Params};
pub use parse::parse_expr;
pub use zero::{Exclusion, SamplingBox, ZeroTest, ZeroVerdict};

/// Exact rational constant with a cached `f64` approximation.
#[derive(Debug, Clone)]
pub struct Rational {
    value: BigRational,
    approx: f64,
}

impl Rational {
    pub fn new(value: BigRational) -> Self {
        let approx = ratio_to_f64(&value);
        Self { value, approx }
    }

    pub fn integer(n: i64) -> Self {
        Self::new(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn fraction(num: i64, den: i64) -> Self {
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// Exact binary value of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::new)
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.value.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerator or denominator: scale both down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl Eq for Rational {}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

/// Unary functions and the two-argument angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    /// `atan2(a, b)`: the angle of the point `(b, a)`.
    Atan2,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Atan2 => "atan2",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "atan2" => Func::Atan2,
            _ => return None,
        })
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Atan2 => 2,
            _ => 1,
        }
    }
}

/// A node of the expression tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    Pi,
    Coord(usize),
    Param(Arc<str>),
    Func(Func, Vec<ScalarExpr>),
    Neg(ScalarExpr),
    Add(Vec<ScalarExpr>),
    Mul(Vec<ScalarExpr>),
    Div(ScalarExpr, ScalarExpr),
    Pow(ScalarExpr, i64),
}

#[derive(Debug)]
struct Inner {
    node: Node,
    canonical: bool,
}

/// Immutable symbolic scalar expression. Cloning is cheap.
#[derive(Clone)]
pub struct ScalarExpr(Arc<Inner>);

impl PartialEq for ScalarExpr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.node == other.0.node
    }
}

impl Eq for ScalarExpr {}

impl PartialOrd for ScalarExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScalarExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0.node.cmp(&other.0.node)
    }
}

impl Hash for ScalarExpr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.node.hash(state);
    }
}

impl std::fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl ScalarExpr {
    fn raw(node: Node) -> Self {
        Self(Arc::new(Inner {
            node,
            canonical: false,
        }))
    }

    fn canonical(node: Node) -> Self {
        Self(Arc::new(Inner {
            node,
            canonical: true,
        }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    /// True when the tree is already in simplified normal form.
    pub fn is_canonical(&self) -> bool {
        self.0.canonical
    }

    pub fn constant(r: Rational) -> Self {
        Self::canonical(Node::Const(r))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(Rational::integer(n))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::constant(Rational::fraction(num, den))
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    /// Float literal, stored as its exact binary rational value.
    pub fn float(x: f64) -> Self {
        match Rational::from_f64(x) {
            Some(r) => Self::constant(r),
            None => panic!("non-finite literal {x}"),
        }
    }

    pub fn pi() -> Self {
        Self::canonical(Node::Pi)
    }

    pub fn coord(k: usize) -> Self {
        Self::canonical(Node::Coord(k))
    }

    pub fn param(name: &str) -> Self {
        Self::canonical(Node::Param(Arc::from(name)))
    }

    pub fn neg(a: Self) -> Self {
        Self::raw(Node::Neg(a))
    }

    pub fn sum(terms: Vec<Self>) -> Self {
        match terms.len() {
            0 => Self::zero(),
            1 => terms.into_iter().next().unwrap(),
            _ => Self::raw(Node::Add(terms)),
        }
    }

    pub fn product(factors: Vec<Self>) -> Self {
        match factors.len() {
            0 => Self::one(),
            1 => factors.into_iter().next().unwrap(),
            _ => Self::raw(Node::Mul(factors)),
        }
    }

    pub fn quotient(a: Self, b: Self) -> Self {
        Self::raw(Node::Div(a, b))
    }

    pub fn powi(&self, k: i64) -> Self {
        Self::raw(Node::Pow(self.clone(), k))
    }

    pub fn apply(func: Func, args: Vec<Self>) -> Self {
        assert_eq!(args.len(), func.arity(), "wrong arity for {}", func.name());
        Self::raw(Node::Func(func, args))
    }

    pub fn sin(&self) -> Self {
        Self::apply(Func::Sin, vec![self.clone()])
    }

    pub fn cos(&self) -> Self {
        Self::apply(Func::Cos, vec![self.clone()])
    }

    pub fn exp(&self) -> Self {
        Self::apply(Func::Exp, vec![self.clone()])
    }

    pub fn ln(&self) -> Self {
        Self::apply(Func::Ln, vec![self.clone()])
    }

    pub fn sqrt(&self) -> Self {
        Self::apply(Func::Sqrt, vec![self.clone()])
    }

    pub fn atan2(a: Self, b: Self) -> Self {
        Self::apply(Func::Atan2, vec![a, b])
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(r) => Some(r),
            _ => None,
        }
    }

    /// Syntactic zero test (exact constant zero).
    pub fn is_zero_const(&self) -> bool {
        self.as_const().is_some_and(Rational::is_zero)
    }

    pub fn is_one_const(&self) -> bool {
        self.as_const().is_some_and(Rational::is_one)
    }

    /// Value-preserving canonical form.
    pub fn simplify(&self) -> Self {
        if self.is_canonical() {
            return self.clone();
        }
        normal::Poly::from_expr(self).into_expr()
    }

    /// Exact partial derivative with respect to coordinate `k`, simplified.
    pub fn differentiate(&self, k: usize) -> Self {
        diff::derivative(self, k).simplify()
    }

    /// Replace coordinate `k` by `with` everywhere (result simplified).
    pub fn substitute_coord(&self, k: usize, with: &Self) -> Self {
        self.map_leaves(&|node| match node {
            Node::Coord(j) if *j == k => Some(with.clone()),
            _ => None,
        })
        .simplify()
    }

    /// Replace every coordinate by the matching expression in `images`.
    pub fn substitute_coords(&self, images: &[Self]) -> Self {
        self.map_leaves(&|node| match node {
            Node::Coord(j) => images.get(*j).cloned(),
            _ => None,
        })
        .simplify()
    }

    /// Replace named parameters by expressions.
    pub fn substitute_param(&self, name: &str, with: &Self) -> Self {
        self.map_leaves(&|node| match node {
            Node::Param(p) if &**p == name => Some(with.clone()),
            _ => None,
        })
        .simplify()
    }

    fn map_leaves(&self, f: &dyn Fn(&Node) -> Option<Self>) -> Self {
        if let Some(rep) = f(self.node()) {
            return rep;
        }
        let map_all = |v: &[Self]| v.iter().map(|e| e.map_leaves(f)).collect::<Vec<_>>();
        match self.node() {
            Node::Const(_) | Node::Pi | Node::Coord(_) | Node::Param(_) => self.clone(),
            Node::Func(func, args) => Self::raw(Node::Func(*func, map_all(args))),
            Node::Neg(a) => Self::raw(Node::Neg(a.map_leaves(f))),
            Node::Add(v) => Self::raw(Node::Add(map_all(v))),
            Node::Mul(v) => Self::raw(Node::Mul(map_all(v))),
            Node::Div(a, b) => Self::raw(Node::Div(a.map_leaves(f), b.map_leaves(f))),
            Node::Pow(b, k) => Self::raw(Node::Pow(b.map_leaves(f), *k)),
        }
    }

    /// Names of all parameters that occur in the tree, sorted.
    pub fn parameters(&self) -> Vec<String> {
        let mut out = std::collections::BTreeSet::new();
        self.visit(&mut |n| {
            if let Node::Param(p) = n {
                out.insert(p.to_string());
            }
        });
        out.into_iter().collect()
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_coord(&self) -> Option<usize> {
        let mut best = None;
        self.visit(&mut |n| {
            if let Node::Coord(k) = n {
                best = Some(best.map_or(*k, |b: usize| b.max(*k)));
            }
        });
        best
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }

    fn visit(&self, f: &mut dyn FnMut(&Node)) {
        f(self.node());
        match self.node() {
            Node::Const(_) | Node::Pi | Node::Coord(_) | Node::Param(_) => {}
            Node::Func(_, v) | Node::Add(v) | Node::Mul(v) => v.iter().for_each(|e| e.visit(f)),
            Node::Neg(a) | Node::Pow(a, _) => a.visit(f),
            Node::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }

    /// Top-level additive terms of the expression (the expression itself if
    /// it is not a sum).
    pub fn terms(&self) -> Vec<Self> {
        match self.node() {
            Node::Add(v) => v.clone(),
            _ => vec![self.clone()],
        }
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $build:expr) => {
        impl ops::$trait<ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                $build(self, rhs)
            }
        }
        impl ops::$trait<&ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                $build(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: &ScalarExpr) -> ScalarExpr {
                $build(self, rhs.clone())
            }
        }
        impl ops::$trait<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                $build(self.clone(), rhs)
            }
        }
        impl ops::$trait<i64> for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: i64) -> ScalarExpr {
                $build(self, ScalarExpr::int(rhs))
            }
        }
        impl ops::$trait<i64> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: i64) -> ScalarExpr {
                $build(self.clone(), ScalarExpr::int(rhs))
            }
        }
    };
}

binop!(Add, add, |a, b| ScalarExpr::sum(vec![a, b]));
binop!(Sub, sub, |a, b| ScalarExpr::sum(vec![a, ScalarExpr::neg(b)]));
binop!(Mul, mul, |a, b| ScalarExpr::product(vec![a, b]));
binop!(Div, div, ScalarExpr::quotient);

impl ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self)
    }
}

impl ops::Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::neg(self.clone())
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        ScalarExpr::sum(iter.collect())
    }
}
