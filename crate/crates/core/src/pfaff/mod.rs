//! Topological anatomy of a single 1-form: Pfaff sequence, integrability,
//! torsion and parity, characteristic directions, genus, projectivization.
//!
//! Orientation: `Omega = dx^dy^dz^dt`. The torsion vector `T` is read off
//! `i(T) Omega = A^dA`, i.e. `T^k = (-1)^k H_{complement(k)}`. With that rule
//! the 3+1 split of an action `A = a.dr - phi dt` is
//! `T = -(E x a + phi B, a.B)`, so [`TorsionData::current`] and
//! [`TorsionData::helicity`] carry the negated spatial and time parts, which
//! equal `E x a + phi B` and `a.B` exactly. The parity coefficient is
//! `k = +2 E.B` in this orientation and the dissipation is `Gamma = E.B`.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Params, SamplingBox, ScalarExpr};
use crate::forms::{DifferentialForm, FormVerdict, VectorField};
use crate::linalg;

#[cfg(test)]
mod tests;

fn require_one_form(a: &DifferentialForm) -> Result<()> {
    if a.degree() == 1 {
        Ok(())
    } else {
        Err(Error::Usage(format!("expected a 1-form, got degree {}", a.degree())))
    }
}

fn require_spacetime(a: &DifferentialForm) -> Result<()> {
    require_one_form(a)?;
    if a.chart().dim() == 4 {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "operation needs a 4-dimensional chart, got {}",
            a.chart().dim()
        )))
    }
}

/// `{A, dA, A^dA, dA^dA, ...}` with zero verdicts.
#[derive(Debug, Clone)]
pub struct PfaffSequence {
    pub elements: Vec<DifferentialForm>,
    pub nonzero: Vec<bool>,
    /// Number of leading nonzero elements over the whole sampling box.
    pub dimension: usize,
}

/// Alternate `d` and `A ^` until the degree exceeds the chart dimension.
pub fn pfaff_elements(a: &DifferentialForm) -> Result<Vec<DifferentialForm>> {
    require_one_form(a)?;
    let n = a.chart().dim();
    let mut out = vec![a.clone()];
    while out.len() < n {
        let last = out.last().unwrap();
        let next = if out.len() % 2 == 1 { last.d() } else { a.wedge(last)? };
        out.push(next);
    }
    Ok(out)
}

pub fn pfaff_sequence(a: &DifferentialForm, domain: &SamplingBox) -> Result<PfaffSequence> {
    let elements = pfaff_elements(a)?;
    let mut nonzero = Vec::with_capacity(elements.len());
    for e in &elements {
        nonzero.push(!e.is_zero(domain)?.is_zero());
    }
    let dimension = nonzero.iter().take_while(|b| **b).count();
    Ok(PfaffSequence {
        elements,
        nonzero,
        dimension,
    })
}

impl PfaffSequence {
    /// Pfaff dimension at a single point: leading elements whose numeric
    /// coefficients are not all below `tol * (1 + max |A_mu|)`.
    pub fn pointwise_dimension(&self, point: &[f64], params: &Params, tol: f64) -> Result<usize> {
        let scale = self.elements[0]
            .eval(point, params)?
            .values()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let mut count = 0;
        for e in &self.elements {
            let vals = e.eval(point, params)?;
            if vals.values().all(|v| v.abs() <= tol * (1.0 + scale)) {
                break;
            }
            count += 1;
        }
        Ok(count)
    }
}

/// Complete integrability: `A ^ dA = 0`.
pub fn frobenius_integrable(a: &DifferentialForm, domain: &SamplingBox) -> Result<bool> {
    require_one_form(a)?;
    Ok(a.wedge(&a.d())?.is_zero(domain)?.is_zero())
}

/// One member of the topological base with its Kuratowski closure.
#[derive(Debug, Clone)]
pub struct BaseElement {
    pub label: String,
    pub forms: Vec<DifferentialForm>,
}

/// `{A, A u dA, A^dA, A^dA u dA^dA, ...}`.
#[derive(Debug, Clone)]
pub struct TopologicalBase {
    pub elements: Vec<BaseElement>,
    /// True iff `A ^ dA` is nonzero.
    pub disconnected: bool,
}

pub fn topological_base(a: &DifferentialForm, domain: &SamplingBox) -> Result<TopologicalBase> {
    let seq = pfaff_sequence(a, domain)?;
    let names = ["A", "dA", "A^dA", "dA^dA", "A^dA^dA", "dA^dA^dA"];
    let label = |i: usize| names.get(i).map_or_else(|| format!("P{i}"), |s| s.to_string());
    let mut elements = Vec::new();
    for i in (0..seq.elements.len()).step_by(2) {
        elements.push(BaseElement {
            label: label(i),
            forms: vec![seq.elements[i].clone()],
        });
        let mut closure = vec![seq.elements[i].clone()];
        if let Some(next) = seq.elements.get(i + 1) {
            closure.push(next.clone());
        }
        elements.push(BaseElement {
            label: format!("{} u {}", label(i), label(i + 1)),
            forms: closure,
        });
    }
    Ok(TopologicalBase {
        elements,
        disconnected: seq.nonzero.get(2).copied().unwrap_or(false),
    })
}

/// `K = dA ^ dA` and its coefficient on `dx^dy^dz^dt`.
pub fn parity(a: &DifferentialForm) -> Result<(DifferentialForm, ScalarExpr)> {
    require_spacetime(a)?;
    let f = a.d();
    let k = f.wedge(&f)?;
    let coeff = k.coeff(&[0, 1, 2, 3]);
    Ok((k, coeff))
}

/// The vector `T` with `i(T) Omega = H` for a 3-form on a 4-chart.
pub fn torsion_vector(h: &DifferentialForm) -> Result<VectorField> {
    let chart = h.chart();
    if chart.dim() != 4 || h.degree() != 3 {
        return Err(Error::Usage("torsion vector needs a 3-form on a 4-chart".into()));
    }
    let comps = (0..4)
        .map(|k| {
            let rest: Vec<usize> = (0..4).filter(|&i| i != k).collect();
            let c = h.coeff(&rest);
            if k % 2 == 1 {
                -c
            } else {
                c
            }
        })
        .collect();
    VectorField::new(chart, comps)
}

#[derive(Debug, Clone)]
pub struct TorsionData {
    /// `H = A ^ dA`.
    pub torsion: DifferentialForm,
    /// `K = dA ^ dA`.
    pub parity: DifferentialForm,
    /// Coefficient of `K` on `dx^dy^dz^dt`.
    pub k: ScalarExpr,
    /// `T` with `i(T) Omega = H`.
    pub vector: VectorField,
    /// `Gamma` with `i(T) dA = Gamma A`.
    pub gamma: ScalarExpr,
    /// Spatial torsion current `-(T^x, T^y, T^z)`, i.e. `E x a + phi B`.
    pub current: [ScalarExpr; 3],
    /// Helicity density `-T^t`, i.e. `a.B`.
    pub helicity: ScalarExpr,
}

impl TorsionData {
    /// Sampled ratio `k / Gamma` at points where `|Gamma|` is not tiny:
    /// `(mean, max deviation from the mean)`.
    pub fn parity_ratio(&self, domain: &SamplingBox) -> Result<Option<(f64, f64)>> {
        let mut ratios = Vec::new();
        for p in domain.points() {
            let g = self.gamma.eval(&p, &domain.params);
            let k = self.k.eval(&p, &domain.params);
            if let (Ok(g), Ok(k)) = (g, k) {
                if g.abs() > 1e-8 {
                    ratios.push(k / g);
                }
            }
        }
        if ratios.is_empty() {
            return Ok(None);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        let dev = ratios.iter().fold(0.0f64, |m, r| m.max((r - mean).abs()));
        Ok(Some((mean, dev)))
    }
}

fn consistency(what: &str, v: FormVerdict) -> Result<()> {
    match v {
        FormVerdict::Zero => Ok(()),
        FormVerdict::Nonzero {
            component,
            witness,
            value,
        } => Err(Error::Consistency(format!(
            "{what}: component {component:?} is {value:e} at {witness:?}"
        ))),
    }
}

/// Extract `Gamma` from `i(T) dA = Gamma A`.
fn extract_gamma(a: &DifferentialForm, w: &DifferentialForm, domain: &SamplingBox) -> Result<ScalarExpr> {
    if w.is_syntactically_zero() || a.is_syntactically_zero() {
        return Ok(ScalarExpr::zero());
    }
    let mut candidates: Vec<(usize, ScalarExpr)> = a
        .terms()
        .map(|(idx, c)| (idx[0], c.clone()))
        .collect();
    candidates.sort_by_key(|(_, c)| c.size());
    let mut last = None;
    for (mu, a_mu) in candidates {
        let gamma = (w.coeff(&[mu]) / a_mu).simplify();
        let residual = w.try_sub(&a.scale(&gamma))?;
        match residual.is_zero(domain)? {
            FormVerdict::Zero => return Ok(gamma),
            v => last = Some(v),
        }
    }
    consistency("i(T)dA is not proportional to A", last.expect("at least one candidate"))?;
    unreachable!()
}

/// Torsion vector, parity and dissipation of an action on a 4-chart; the
/// defining identities are verified before returning.
pub fn torsion_data(a: &DifferentialForm, domain: &SamplingBox) -> Result<TorsionData> {
    require_spacetime(a)?;
    let f = a.d();
    let h = a.wedge(&f)?;
    let (k_form, k) = parity(a)?;
    let t = torsion_vector(&h)?;
    let w = f.interior(&t)?;
    let gamma = extract_gamma(a, &w, domain)?;

    consistency("i(T)A = 0", a.interior(&t)?.is_zero(domain)?)?;
    consistency("i(T)dA = Gamma A", w.try_sub(&a.scale(&gamma))?.is_zero(domain)?)?;
    consistency("dH = K", h.d().try_sub(&k_form)?.is_zero(domain)?)?;

    let c = t.components();
    Ok(TorsionData {
        current: [
            (-&c[0]).simplify(),
            (-&c[1]).simplify(),
            (-&c[2]).simplify(),
        ],
        helicity: (-&c[3]).simplify(),
        torsion: h,
        parity: k_form,
        k,
        vector: t,
        gamma,
    })
}

/// The antisymmetric matrix `F_{mu nu}` of `dA` at a point.
pub fn field_matrix(a: &DifferentialForm, point: &[f64], params: &Params) -> Result<DMatrix<f64>> {
    require_one_form(a)?;
    let n = a.chart().dim();
    let mut m = DMatrix::zeros(n, n);
    for (idx, v) in a.d().eval(point, params)? {
        m[(idx[0], idx[1])] = v;
        m[(idx[1], idx[0])] = -v;
    }
    Ok(m)
}

const NULL_TOL: f64 = 1e-10;

/// Orthonormal basis of `{V : i(V) dA = 0}` at a point.
pub fn extremal_space(a: &DifferentialForm, point: &[f64], params: &Params) -> Result<Vec<Vec<f64>>> {
    Ok(linalg::null_space(&field_matrix(a, point, params)?, NULL_TOL))
}

/// Orthonormal basis of `{V : i(V) dA = 0, i(V) A = 0}` at a point.
pub fn characteristic_space(
    a: &DifferentialForm,
    point: &[f64],
    params: &Params,
) -> Result<Vec<Vec<f64>>> {
    let f = field_matrix(a, point, params)?;
    let n = f.ncols();
    let mut m = DMatrix::zeros(n + 1, n);
    m.view_mut((0, 0), (n, n)).copy_from(&f);
    for (idx, v) in a.eval(point, params)? {
        m[(n, idx[0])] = v;
    }
    Ok(linalg::null_space(&m, NULL_TOL))
}

/// Numerical rank of `F` at a point.
pub fn field_rank(a: &DifferentialForm, point: &[f64], params: &Params) -> Result<usize> {
    Ok(linalg::rank(&field_matrix(a, point, params)?, NULL_TOL))
}

#[derive(Debug, Clone)]
pub struct GenusReport {
    /// 3 when the torsion current vanishes, 2 otherwise.
    pub genus: u8,
    pub torsion_current_zero: bool,
    /// `T_x dy^dz + T_y dz^dx + T_z dx^dy`, the `dt`-free remainder of
    /// `phi F` after eliminating `phi dt` with `A = 0`.
    pub current_form: DifferentialForm,
}

pub fn genus_diagnostic(a: &DifferentialForm, domain: &SamplingBox) -> Result<GenusReport> {
    require_spacetime(a)?;
    let h = a.wedge(&a.d())?;
    let t = torsion_vector(&h)?;
    let c = t.components();
    let chart = a.chart();
    // Current = -(T^x, T^y, T^z).
    let current_form = DifferentialForm::new(
        chart,
        2,
        [
            (vec![1, 2], -&c[0]),
            (vec![2, 0], -&c[1]),
            (vec![0, 1], -&c[2]),
        ],
    )?;
    let zero = current_form.is_zero(domain)?.is_zero();
    Ok(GenusReport {
        genus: if zero { 3 } else { 2 },
        torsion_current_zero: zero,
        current_form,
    })
}

#[derive(Debug, Clone)]
pub struct Projectivized {
    pub form: DifferentialForm,
    /// `sqrt(sum A_mu^2)`.
    pub lambda: ScalarExpr,
    /// Parity coefficient of the projectivized form (4-charts only).
    pub euler_integrand: Option<ScalarExpr>,
}

/// `A / lambda` with `lambda = sqrt(sum A_mu^2)`; fails if `lambda` vanishes
/// at the centre or a sample point of the box.
pub fn projectivize(a: &DifferentialForm, domain: &SamplingBox) -> Result<Projectivized> {
    require_one_form(a)?;
    let squares: Vec<ScalarExpr> = a.terms().map(|(_, c)| c * c).collect();
    let lambda = ScalarExpr::sum(squares).simplify().sqrt().simplify();
    if lambda.is_zero_const() {
        return Err(Error::Singularity {
            expr: "sqrt(sum of squared coefficients) = 0".into(),
        });
    }
    let compiled = lambda.compile();
    let bound = compiled.bind(&domain.params)?;
    let mut points = vec![domain.center()];
    points.extend(domain.points());
    for p in points {
        let v = compiled.eval(&p, &bound)?;
        if v.abs() < 1e-12 {
            return Err(Error::Singularity {
                expr: format!("{} at {p:?}", lambda.display(a.chart())),
            });
        }
    }
    let inv = (ScalarExpr::one() / lambda.clone()).simplify();
    let form = a.scale(&inv);
    let euler_integrand = if a.chart().dim() == 4 {
        Some(parity(&form)?.1)
    } else {
        None
    };
    Ok(Projectivized {
        form,
        lambda,
        euler_integrand,
    })
}

/// Helper for building a spacetime 1-form `a.dr - phi dt`.
pub fn em_action(chart: &Arc<Chart>, a: [ScalarExpr; 3], phi: ScalarExpr) -> Result<DifferentialForm> {
    let [ax, ay, az] = a;
    DifferentialForm::one_form(chart, vec![ax, ay, az, -phi])
}
