//! Differential forms on a chart and the Cartan operations.
//!
//! A p-form stores one coefficient per strictly increasing index tuple;
//! the wedge sign is the parity of the sorting permutation and the volume
//! form is `dx^0 ^ dx^1 ^ ... ^ dx^(n-1)`.

mod field;

use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::Arc;

pub use field::VectorField;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Params, SamplingBox, ScalarExpr, ZeroVerdict};

/// Sort `idx` in place and return the permutation sign, or `None` when an
/// index repeats.
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// A differential form of fixed degree on one chart.
#[derive(Clone, PartialEq)]
pub struct DifferentialForm {
    chart: Arc<Chart>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, ScalarExpr>,
}

/// Outcome of a coefficientwise zero test.
#[derive(Debug, Clone, PartialEq)]
pub enum FormVerdict {
    Zero,
    Nonzero {
        component: Vec<usize>,
        witness: Vec<f64>,
        value: f64,
    },
}

impl FormVerdict {
    pub fn is_zero(&self) -> bool {
        matches!(self, FormVerdict::Zero)
    }
}

impl DifferentialForm {
    /// Build a form from `(indices, coefficient)` pairs. Indices may come in
    /// any order; they are sorted with the permutation sign and repeated
    /// indices drop the term.
    pub fn new(
        chart: &Arc<Chart>,
        degree: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<Vec<usize>, Vec<ScalarExpr>> = BTreeMap::new();
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::Usage(format!(
                    "index tuple {idx:?} does not match degree {degree}"
                )));
            }
            for &k in &idx {
                chart.check_index(k)?;
            }
            let Some(sign) = sort_with_sign(&mut idx) else {
                continue;
            };
            let c = if sign < 0 { -c } else { c };
            acc.entry(idx).or_default().push(c);
        }
        let mut form = Self::zero(chart, degree);
        for (idx, parts) in acc {
            form.set(idx, ScalarExpr::sum(parts));
        }
        Ok(form)
    }

    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Self {
            chart: chart.clone(),
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(chart: &Arc<Chart>, f: ScalarExpr) -> Self {
        let mut form = Self::zero(chart, 0);
        form.set(Vec::new(), f);
        form
    }

    /// The 1-form `sum_k c_k dx^k`.
    pub fn one_form(chart: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::Usage(format!(
                "1-form has {} components on a {}-dimensional chart",
                components.len(),
                chart.dim()
            )));
        }
        Self::new(chart, 1, components.into_iter().enumerate().map(|(k, c)| (vec![k], c)))
    }

    /// The basis form `dx^i1 ^ ... ^ dx^ip` (indices in any order).
    pub fn basis(chart: &Arc<Chart>, indices: &[usize]) -> Result<Self> {
        Self::new(chart, indices.len(), [(indices.to_vec(), ScalarExpr::one())])
    }

    /// `dx^0 ^ ... ^ dx^(n-1)`.
    pub fn volume(chart: &Arc<Chart>) -> Self {
        Self::basis(chart, &(0..chart.dim()).collect::<Vec<_>>()).expect("valid indices")
    }

    /// `d` of a coordinate function.
    pub fn differential(chart: &Arc<Chart>, k: usize) -> Result<Self> {
        Self::basis(chart, &[k])
    }

    fn set(&mut self, idx: Vec<usize>, c: ScalarExpr) {
        let c = c.simplify();
        if c.is_zero_const() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of a strictly increasing tuple (zero when absent).
    pub fn coeff(&self, idx: &[usize]) -> ScalarExpr {
        self.coeffs.get(idx).cloned().unwrap_or_else(ScalarExpr::zero)
    }

    /// Coefficient of `dx^k` for a 1-form, or the value of a 0-form (k ignored).
    pub fn component(&self, k: usize) -> ScalarExpr {
        if self.degree == 0 {
            self.coeff(&[])
        } else {
            self.coeff(&[k])
        }
    }

    /// All components of a 1-form in chart order.
    pub fn components(&self) -> Vec<ScalarExpr> {
        (0..self.chart.dim()).map(|k| self.coeff(&[k])).collect()
    }

    /// Nonzero terms in index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &ScalarExpr)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact (syntactic) zero after simplification.
    pub fn is_syntactically_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same_chart(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.chart, &other.chart) || self.chart == other.chart {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "forms live on different charts {} and {}",
                self.chart, other.chart
            )))
        }
    }

    fn check_field(&self, v: &VectorField) -> Result<()> {
        if Arc::ptr_eq(&self.chart, v.chart()) || *self.chart == **v.chart() {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "vector field on {} applied to a form on {}",
                v.chart(),
                self.chart
            )))
        }
    }

    fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (idx, c) in &self.coeffs {
            out.set(idx.clone(), f(c));
        }
        out
    }

    /// Multiply every coefficient by a scalar function.
    pub fn scale(&self, f: &ScalarExpr) -> Self {
        self.map_coeffs(|c| f * c)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_chart(other)?;
        if self.degree != other.degree {
            return Err(Error::Usage(format!(
                "cannot add forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            let sum = &out.coeff(idx) + c;
            out.set(idx.clone(), sum);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// Replace a named parameter everywhere.
    pub fn substitute_param(&self, name: &str, with: &ScalarExpr) -> Self {
        self.map_coeffs(|c| c.substitute_param(name, with))
    }

    /// Substitute expressions for coordinates (same chart).
    pub fn substitute_coords(&self, images: &[ScalarExpr]) -> Self {
        self.map_coeffs(|c| c.substitute_coords(images))
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = self.coeffs.values().flat_map(ScalarExpr::parameters).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let n = self.chart.dim();
        let mut out: BTreeMap<Vec<usize>, Vec<ScalarExpr>> = BTreeMap::new();
        for (idx, c) in &self.coeffs {
            for k in 0..n {
                if idx.contains(&k) {
                    continue;
                }
                let dc = c.differentiate(k);
                if dc.is_zero_const() {
                    continue;
                }
                let pos = idx.iter().filter(|&&i| i < k).count();
                let mut new = idx.clone();
                new.insert(pos, k);
                out.entry(new)
                    .or_default()
                    .push(if pos % 2 == 1 { -dc } else { dc });
            }
        }
        let mut form = Self::zero(&self.chart, self.degree + 1);
        for (idx, parts) in out {
            form.set(idx, ScalarExpr::sum(parts));
        }
        form
    }

    /// Exterior product `self ^ other`.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.same_chart(other)?;
        let mut out: BTreeMap<Vec<usize>, Vec<ScalarExpr>> = BTreeMap::new();
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let mut idx: Vec<usize> = a.iter().chain(b).copied().collect();
                let Some(sign) = sort_with_sign(&mut idx) else {
                    continue;
                };
                let prod = ca * cb;
                out.entry(idx)
                    .or_default()
                    .push(if sign < 0 { -prod } else { prod });
            }
        }
        let mut form = Self::zero(&self.chart, self.degree + other.degree);
        for (idx, parts) in out {
            form.set(idx, ScalarExpr::sum(parts));
        }
        Ok(form)
    }

    /// Contraction with `J = rho * V`.
    pub fn interior(&self, v: &VectorField) -> Result<Self> {
        self.check_field(v)?;
        if self.degree == 0 {
            return Err(Error::Usage("interior product of a 0-form".into()));
        }
        let comps = v.effective();
        let mut out: BTreeMap<Vec<usize>, Vec<ScalarExpr>> = BTreeMap::new();
        for (idx, c) in &self.coeffs {
            for (j, &i) in idx.iter().enumerate() {
                if comps[i].is_zero_const() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(j);
                let term = &comps[i] * c;
                out.entry(rest)
                    .or_default()
                    .push(if j % 2 == 1 { -term } else { term });
            }
        }
        let mut form = Self::zero(&self.chart, self.degree - 1);
        for (idx, parts) in out {
            form.set(idx, ScalarExpr::sum(parts));
        }
        Ok(form)
    }

    /// Lie derivative by Cartan's formula `i(J) d w + d i(J) w`.
    pub fn lie_derivative(&self, v: &VectorField) -> Result<Self> {
        self.check_field(v)?;
        let a = self.d().interior(v)?;
        if self.degree == 0 {
            return Ok(a);
        }
        a.try_add(&self.interior(v)?.d())
    }

    /// Coefficientwise probabilistic zero test.
    pub fn is_zero(&self, domain: &SamplingBox) -> Result<FormVerdict> {
        for (idx, c) in &self.coeffs {
            if let ZeroVerdict::Nonzero { witness, value } = c.is_zero(domain)? {
                return Ok(FormVerdict::Nonzero {
                    component: idx.clone(),
                    witness,
                    value,
                });
            }
        }
        Ok(FormVerdict::Zero)
    }

    /// Numeric coefficients at a point.
    pub fn eval(&self, point: &[f64], params: &Params) -> Result<BTreeMap<Vec<usize>, f64>> {
        self.coeffs
            .iter()
            .map(|(idx, c)| Ok((idx.clone(), c.eval(point, params)?)))
            .collect()
    }

    /// Formats with the chart's coordinate names, e.g. `y*dx^dz + dt`.
    pub fn display(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (idx, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            let basis: Vec<String> = idx.iter().map(|&k| format!("d{}", self.chart.name(k))).collect();
            if idx.is_empty() {
                write!(f, "{}", c.display(&self.chart))?;
            } else if c.is_one_const() {
                f.write_str(&basis.join("^"))?;
            } else {
                write!(f, "({})*{}", c.display(&self.chart), basis.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-form {self}", self.degree)
    }
}

impl ops::Neg for &DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        self.map_coeffs(|c| -c)
    }
}

impl ops::Neg for DifferentialForm {
    type Output = DifferentialForm;
    fn neg(self) -> DifferentialForm {
        -&self
    }
}

/// `d w`.
pub fn exterior_derivative(w: &DifferentialForm) -> DifferentialForm {
    w.d()
}

/// `a ^ b`.
pub fn wedge(a: &DifferentialForm, b: &DifferentialForm) -> Result<DifferentialForm> {
    a.wedge(b)
}

/// `i(V) w`.
pub fn interior(v: &VectorField, w: &DifferentialForm) -> Result<DifferentialForm> {
    w.interior(v)
}

/// `L(J) w`.
pub fn lie_derivative(j: &VectorField, w: &DifferentialForm) -> Result<DifferentialForm> {
    w.lie_derivative(j)
}

/// Discontinuity terms of a process `J = rho * v` acting on `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct Excess {
    /// `d(rho) ^ i(v) sigma`, a form of the same degree as `sigma`.
    pub leading: DifferentialForm,
    /// `dd(rho) ^ i(v) sigma + rho dd(i(v) sigma)`, of degree `p + 1`. This
    /// is the formal value of `L(J) d sigma - d L(J) sigma`; it vanishes for
    /// smooth `rho`, and so does the difference it stands for.
    pub defect: DifferentialForm,
}

/// The excess of a process with support `rho`. The field's own support (if
/// any) is folded into `v`.
pub fn excess_function(
    rho: &ScalarExpr,
    v: &VectorField,
    sigma: &DifferentialForm,
) -> Result<Excess> {
    let chart = sigma.chart();
    let r = DifferentialForm::scalar(chart, rho.clone());
    let iv = sigma.interior(v)?;
    let leading = r.d().wedge(&iv)?;
    let defect = r.d().d().wedge(&iv)?.try_add(&iv.d().d().scale(rho))?;
    Ok(Excess { leading, defect })
}
