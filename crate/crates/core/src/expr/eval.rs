use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Func, Node, ScalarExpr};
use crate::error::{Error, Result};

/// Numeric values for named parameters.
pub type Params = BTreeMap<String, f64>;

fn singular(e: &ScalarExpr) -> Error {
    Error::Singularity {
        expr: e.to_string(),
    }
}

fn apply_func(f: Func, args: &[f64], source: &ScalarExpr) -> Result<f64> {
    let u = args[0];
    let v = match f {
        Func::Sin => u.sin(),
        Func::Cos => u.cos(),
        Func::Exp => u.exp(),
        Func::Ln => {
            if u <= 0.0 {
                return Err(Error::Domain {
                    func: "ln",
                    expr: source.to_string(),
                });
            }
            u.ln()
        }
        Func::Sqrt => {
            if u < 0.0 {
                return Err(Error::Domain {
                    func: "sqrt",
                    expr: source.to_string(),
                });
            }
            u.sqrt()
        }
        Func::Atan2 => u.atan2(args[1]),
    };
    Ok(v)
}

fn checked_powi(base: f64, k: i64, source: &ScalarExpr) -> Result<f64> {
    if k < 0 && base == 0.0 {
        return Err(singular(source));
    }
    let k = k.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    Ok(base.powi(k))
}

impl ScalarExpr {
    /// IEEE-double evaluation at `point` (indexed by chart coordinate).
    ///
    /// Division by zero, negative powers of zero, and `ln`/`sqrt` outside
    /// their domain are reported as errors naming the offending
    /// subexpression instead of producing NaN or infinity.
    pub fn eval(&self, point: &[f64], params: &Params) -> Result<f64> {
        let v = self.eval_inner(point, params)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(singular(self))
        }
    }

    fn eval_inner(&self, point: &[f64], params: &Params) -> Result<f64> {
        Ok(match self.node() {
            Node::Const(r) => r.to_f64(),
            Node::Pi => std::f64::consts::PI,
            Node::Coord(k) => *point.get(*k).ok_or_else(|| {
                Error::Usage(format!(
                    "coordinate index {k} out of range for a point of dimension {}",
                    point.len()
                ))
            })?,
            Node::Param(name) => *params
                .get(&**name)
                .ok_or_else(|| Error::UnboundParameter(name.to_string()))?,
            Node::Func(f, args) => {
                let mut vals = [0.0; 2];
                for (slot, a) in vals.iter_mut().zip(args) {
                    *slot = a.eval_inner(point, params)?;
                }
                apply_func(*f, &vals[..args.len()], &args[0])?
            }
            Node::Neg(a) => -a.eval_inner(point, params)?,
            Node::Add(v) => {
                let mut acc = 0.0;
                for t in v {
                    acc += t.eval_inner(point, params)?;
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = 1.0;
                for t in v {
                    acc *= t.eval_inner(point, params)?;
                }
                acc
            }
            Node::Div(a, b) => {
                let den = b.eval_inner(point, params)?;
                if den == 0.0 {
                    return Err(singular(b));
                }
                a.eval_inner(point, params)? / den
            }
            Node::Pow(b, k) => checked_powi(b.eval_inner(point, params)?, *k, b)?,
        })
    }

    /// Flatten into a stack program for repeated evaluation.
    pub fn compile(&self) -> CompiledExpr {
        let mut c = CompiledExpr {
            ops: Vec::new(),
            params: Vec::new(),
            sources: Vec::new(),
        };
        c.emit(self);
        c
    }
}

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Coord(usize),
    Param(usize),
    Neg,
    Add(usize),
    Mul(usize),
    Div(usize),
    Pow(i64, usize),
    Func(Func, usize),
}

/// Stack-machine form of an expression with parameters resolved to slots.
#[derive(Debug, Clone)]
pub struct CompiledExpr {
    ops: Vec<Op>,
    params: Vec<Arc<str>>,
    sources: Vec<ScalarExpr>,
}

impl CompiledExpr {
    fn source(&mut self, e: &ScalarExpr) -> usize {
        self.sources.push(e.clone());
        self.sources.len() - 1
    }

    fn emit(&mut self, e: &ScalarExpr) {
        match e.node() {
            Node::Const(r) => self.ops.push(Op::Const(r.to_f64())),
            Node::Pi => self.ops.push(Op::Const(std::f64::consts::PI)),
            Node::Coord(k) => self.ops.push(Op::Coord(*k)),
            Node::Param(name) => {
                let slot = match self.params.iter().position(|p| p == name) {
                    Some(i) => i,
                    None => {
                        self.params.push(name.clone());
                        self.params.len() - 1
                    }
                };
                self.ops.push(Op::Param(slot));
            }
            Node::Func(f, args) => {
                for a in args {
                    self.emit(a);
                }
                let s = self.source(&args[0]);
                self.ops.push(Op::Func(*f, s));
            }
            Node::Neg(a) => {
                self.emit(a);
                self.ops.push(Op::Neg);
            }
            Node::Add(v) => {
                for t in v {
                    self.emit(t);
                }
                self.ops.push(Op::Add(v.len()));
            }
            Node::Mul(v) => {
                for t in v {
                    self.emit(t);
                }
                self.ops.push(Op::Mul(v.len()));
            }
            Node::Div(a, b) => {
                self.emit(a);
                self.emit(b);
                let s = self.source(b);
                self.ops.push(Op::Div(s));
            }
            Node::Pow(b, k) => {
                self.emit(b);
                let s = self.source(b);
                self.ops.push(Op::Pow(*k, s));
            }
        }
    }

    /// Parameter names in slot order.
    pub fn param_names(&self) -> &[Arc<str>] {
        &self.params
    }

    /// Resolve parameter slots from a map.
    pub fn bind(&self, params: &Params) -> Result<Vec<f64>> {
        self.params
            .iter()
            .map(|p| {
                params
                    .get(&**p)
                    .copied()
                    .ok_or_else(|| Error::UnboundParameter(p.to_string()))
            })
            .collect()
    }

    pub fn eval(&self, point: &[f64], bound: &[f64]) -> Result<f64> {
        let mut stack = Vec::with_capacity(16);
        self.eval_with(point, bound, &mut stack)
    }

    /// Evaluate with a caller-provided scratch stack.
    pub fn eval_with(&self, point: &[f64], bound: &[f64], stack: &mut Vec<f64>) -> Result<f64> {
        stack.clear();
        for op in &self.ops {
            match *op {
                Op::Const(c) => stack.push(c),
                Op::Coord(k) => stack.push(*point.get(k).ok_or_else(|| {
                    Error::Usage(format!("coordinate index {k} out of range"))
                })?),
                Op::Param(i) => stack.push(bound[i]),
                Op::Neg => {
                    let v = stack.pop().unwrap();
                    stack.push(-v);
                }
                Op::Add(n) => {
                    let start = stack.len() - n;
                    let mut acc = 0.0;
                    for v in &stack[start..] {
                        acc += v;
                    }
                    stack.truncate(start);
                    stack.push(acc);
                }
                Op::Mul(n) => {
                    let start = stack.len() - n;
                    let mut acc = 1.0;
                    for v in &stack[start..] {
                        acc *= v;
                    }
                    stack.truncate(start);
                    stack.push(acc);
                }
                Op::Div(s) => {
                    let den = stack.pop().unwrap();
                    let num = stack.pop().unwrap();
                    if den == 0.0 {
                        return Err(singular(&self.sources[s]));
                    }
                    stack.push(num / den);
                }
                Op::Pow(k, s) => {
                    let b = stack.pop().unwrap();
                    stack.push(checked_powi(b, k, &self.sources[s])?);
                }
                Op::Func(f, s) => {
                    let n = f.arity();
                    let start = stack.len() - n;
                    let v = apply_func(f, &stack[start..], &self.sources[s])?;
                    stack.truncate(start);
                    stack.push(v);
                }
            }
        }
        let v = stack.pop().unwrap_or(0.0);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Singularity {
                expr: "non-finite value".into(),
            })
        }
    }
}

/// A compiled expression with its parameters already resolved.
#[derive(Debug, Clone)]
pub struct BoundExpr {
    compiled: CompiledExpr,
    bound: Vec<f64>,
}

impl BoundExpr {
    pub fn new(e: &ScalarExpr, params: &Params) -> Result<Self> {
        let compiled = e.compile();
        let bound = compiled.bind(params)?;
        Ok(Self { compiled, bound })
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        self.compiled.eval(point, &self.bound)
    }

    pub fn eval_with(&self, point: &[f64], stack: &mut Vec<f64>) -> Result<f64> {
        self.compiled.eval_with(point, &self.bound, stack)
    }
}
