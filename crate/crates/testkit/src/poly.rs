//! Integer polynomials in dense-exponent form: the expand-and-compare
//! oracle for the normal form.

use std::collections::BTreeMap;

use cartan::ScalarExpr;
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Vec<u32>, i128>,
    pub vars: usize,
}

impl Poly {
    pub fn constant(vars: usize, c: i128) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; vars], c);
        }
        Self { terms, vars }
    }

    pub fn var(vars: usize, k: usize) -> Self {
        let mut e = vec![0; vars];
        e[k] = 1;
        Self {
            terms: BTreeMap::from([(e, 1)]),
            vars,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let slot = out.terms.entry(e.clone()).or_insert(0);
            *slot += c;
            if *slot == 0 {
                out.terms.remove(e);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            vars: self.vars,
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::constant(self.vars, 0);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out = out.add(&Self {
                    terms: BTreeMap::from([(e, ca * cb)]),
                    vars: self.vars,
                });
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Unexpanded polynomial expression, convertible both ways.
#[derive(Debug, Clone)]
pub enum Tree {
    Const(i64),
    Var(usize),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Pow(Box<Tree>, u32),
}

impl Tree {
    pub fn random<R: Rng>(rng: &mut R, vars: usize, depth: usize) -> Self {
        if depth == 0 || rng.random_bool(0.2) {
            return if rng.random_bool(0.6) {
                Tree::Var(rng.random_range(0..vars))
            } else {
                Tree::Const(rng.random_range(-4..=4))
            };
        }
        let op = rng.random_range(0..7);
        let a = Box::new(Tree::random(rng, vars, depth - 1));
        if op == 6 {
            return Tree::Pow(a, rng.random_range(0..=3));
        }
        let b = Box::new(Tree::random(rng, vars, depth - 1));
        match op {
            0 | 1 => Tree::Add(a, b),
            2 | 3 => Tree::Mul(a, b),
            _ => Tree::Sub(a, b),
        }
    }

    pub fn expand(&self, vars: usize) -> Poly {
        match self {
            Tree::Const(c) => Poly::constant(vars, *c as i128),
            Tree::Var(k) => Poly::var(vars, *k),
            Tree::Add(a, b) => a.expand(vars).add(&b.expand(vars)),
            Tree::Sub(a, b) => a.expand(vars).add(&b.expand(vars).neg()),
            Tree::Mul(a, b) => a.expand(vars).mul(&b.expand(vars)),
            Tree::Pow(a, k) => {
                let base = a.expand(vars);
                (0..*k).fold(Poly::constant(vars, 1), |acc, _| acc.mul(&base))
            }
        }
    }

    pub fn to_expr(&self) -> ScalarExpr {
        match self {
            Tree::Const(c) => ScalarExpr::int(*c),
            Tree::Var(k) => ScalarExpr::coord(*k),
            Tree::Add(a, b) => a.to_expr() + b.to_expr(),
            Tree::Sub(a, b) => a.to_expr() - b.to_expr(),
            Tree::Mul(a, b) => a.to_expr() * b.to_expr(),
            Tree::Pow(a, k) => a.to_expr().powi(*k as i64),
        }
    }

    /// Textual form for the expression parser.
    pub fn to_text(&self, names: &[&str]) -> String {
        match self {
            Tree::Const(c) if *c < 0 => format!("({c})"),
            Tree::Const(c) => c.to_string(),
            Tree::Var(k) => names[*k].to_string(),
            Tree::Add(a, b) => format!("({} + {})", a.to_text(names), b.to_text(names)),
            Tree::Sub(a, b) => format!("({} - {})", a.to_text(names), b.to_text(names)),
            Tree::Mul(a, b) => format!("{} * {}", a.to_text(names), b.to_text(names)),
            Tree::Pow(a, k) => format!("({})^{k}", a.to_text(names)),
        }
    }
}
