use std::fmt;
use std::sync::Arc;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{Params, ScalarExpr};

/// A vector field on a chart, optionally scaled by a support function.
///
/// Processes act through the product `J = rho * V`; every operation that
/// contracts with the field uses [`VectorField::effective`].
#[derive(Clone, PartialEq)]
pub struct VectorField {
    chart: Arc<Chart>,
    components: Vec<ScalarExpr>,
    support: ScalarExpr,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, components: Vec<ScalarExpr>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::Usage(format!(
                "vector field has {} components on a {}-dimensional chart",
                components.len(),
                chart.dim()
            )));
        }
        Ok(Self {
            chart: chart.clone(),
            components: components.iter().map(ScalarExpr::simplify).collect(),
            support: ScalarExpr::one(),
        })
    }

    pub fn zero(chart: &Arc<Chart>) -> Self {
        Self::new(chart, vec![ScalarExpr::zero(); chart.dim()]).expect("dimension matches")
    }

    /// The coordinate field `d/dx^k`.
    pub fn basis(chart: &Arc<Chart>, k: usize) -> Result<Self> {
        chart.check_index(k)?;
        let mut c = vec![ScalarExpr::zero(); chart.dim()];
        c[k] = ScalarExpr::one();
        Self::new(chart, c)
    }

    pub fn with_support(mut self, rho: ScalarExpr) -> Self {
        self.support = rho.simplify();
        self
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[ScalarExpr] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &ScalarExpr {
        &self.components[k]
    }

    pub fn support(&self) -> &ScalarExpr {
        &self.support
    }

    pub fn has_unit_support(&self) -> bool {
        self.support.is_one_const()
    }

    /// Components of `rho * V`.
    pub fn effective(&self) -> Vec<ScalarExpr> {
        if self.has_unit_support() {
            return self.components.clone();
        }
        self.components
            .iter()
            .map(|c| (&self.support * c).simplify())
            .collect()
    }

    /// The field `f * J` with the support folded into the components.
    pub fn scaled(&self, f: &ScalarExpr) -> Self {
        Self {
            chart: self.chart.clone(),
            components: self.effective().iter().map(|c| (f * c).simplify()).collect(),
            support: ScalarExpr::one(),
        }
    }

    pub fn is_syntactically_zero(&self) -> bool {
        self.support.is_zero_const() || self.components.iter().all(ScalarExpr::is_zero_const)
    }

    /// Numeric components of `rho * V` at a point.
    pub fn eval(&self, point: &[f64], params: &Params) -> Result<Vec<f64>> {
        self.effective().iter().map(|c| c.eval(point, params)).collect()
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .components
            .iter()
            .chain(std::iter::once(&self.support))
            .flat_map(ScalarExpr::parameters)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.has_unit_support() {
            write!(f, "({}) * ", self.support.display(&self.chart))?;
        }
        f.write_str("(")?;
        for (i, c) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", c.display(&self.chart))?;
        }
        f.write_str(")")
    }
}
