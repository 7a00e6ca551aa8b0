//! Fixed-step RK4 flow of a vector field with its variational equation.

use crate::error::{Error, Result};
use crate::expr::{BoundExpr, Params};
use crate::forms::VectorField;

/// Largest RK4 step in flow time.
pub const DEFAULT_MAX_STEP: f64 = 0.002;

/// Coordinates beyond this are treated as blow-up.
const BLOW_UP: f64 = 1e12;

/// Numeric flow of a vector field: `x' = V(x)`, `J' = DV(x) J`.
#[derive(Debug)]
pub struct Flow {
    n: usize,
    field: Vec<BoundExpr>,
    /// Row-major `n x n` derivative of the field.
    jac: Vec<BoundExpr>,
    max_step: f64,
}

impl Flow {
    pub fn new(v: &VectorField, params: &Params, max_step: f64) -> Result<Self> {
        if !(max_step > 0.0) {
            return Err(Error::Usage("flow step must be positive".into()));
        }
        let comps = v.effective();
        let n = comps.len();
        let field = comps.iter().map(|c| BoundExpr::new(c, params)).collect::<Result<_>>()?;
        let mut jac = Vec::with_capacity(n * n);
        for c in &comps {
            for k in 0..n {
                jac.push(BoundExpr::new(&c.differentiate(k), params)?);
            }
        }
        Ok(Self {
            n,
            field,
            jac,
            max_step,
        })
    }

    fn rhs(&self, x: &[f64], j: &[f64], p: usize, stack: &mut Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let fail = |e: Error| Error::Advection(format!("field evaluation failed at {x:?}: {e}"));
        let dx = self
            .field
            .iter()
            .map(|e| e.eval_with(x, stack))
            .collect::<Result<Vec<_>>>()
            .map_err(fail)?;
        let dv = self
            .jac
            .iter()
            .map(|e| e.eval_with(x, stack))
            .collect::<Result<Vec<_>>>()
            .map_err(fail)?;
        let mut dj = vec![0.0; n * p];
        for r in 0..n {
            for c in 0..p {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += dv[r * n + k] * j[k * p + c];
                }
                dj[r * p + c] = acc;
            }
        }
        Ok((dx, dj))
    }

    /// Carry a point and its `n x p` Jacobian along the flow for `time`.
    pub fn transport(
        &self,
        mut x: Vec<f64>,
        mut j: Vec<f64>,
        time: f64,
        stack: &mut Vec<f64>,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        if time == 0.0 {
            return Ok((x, j));
        }
        let p = j.len() / self.n.max(1);
        let steps = (time.abs() / self.max_step).ceil().max(1.0) as usize;
        let h = time / steps as f64;
        let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(u, v)| u + s * v).collect() };
        for _ in 0..steps {
            let (k1x, k1j) = self.rhs(&x, &j, p, stack)?;
            let (k2x, k2j) = self.rhs(&axpy(&x, h / 2.0, &k1x), &axpy(&j, h / 2.0, &k1j), p, stack)?;
            let (k3x, k3j) = self.rhs(&axpy(&x, h / 2.0, &k2x), &axpy(&j, h / 2.0, &k2j), p, stack)?;
            let (k4x, k4j) = self.rhs(&axpy(&x, h, &k3x), &axpy(&j, h, &k3j), p, stack)?;
            for i in 0..x.len() {
                x[i] += h / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
            }
            for i in 0..j.len() {
                j[i] += h / 6.0 * (k1j[i] + 2.0 * k2j[i] + 2.0 * k3j[i] + k4j[i]);
            }
            if x.iter().chain(&j).any(|v| !v.is_finite() || v.abs() > BLOW_UP) {
                return Err(Error::Advection(format!("flow blew up near {x:?}")));
            }
        }
        Ok((x, j))
    }
}
