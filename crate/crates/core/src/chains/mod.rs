//! Integration of forms over parametrized chains, advection of chains along
//! flows, and integral-invariance checks.
//!
//! A `p`-cell is a smooth map from the unit cube `[0,1]^p` into the chart,
//! given by one expression per chart coordinate in the cube coordinates
//! `s0 .. s{p-1}`. Integrals use tensor Gauss-Legendre quadrature and report
//! an order-doubling error estimate. Advected cells carry the flow and are
//! evaluated by integrating the flow together with its variational equation,
//! so the pulled-back Jacobian is exact up to the ODE tolerance.

mod flow;
#[cfg(test)]
mod tests;

use std::sync::Arc;

use gauss_quad::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{BoundExpr, Params, SamplingBox, ScalarExpr};
use crate::forms::{DifferentialForm, VectorField};

pub use flow::{Flow, DEFAULT_MAX_STEP};

/// Default Gauss-Legendre order per axis.
pub const DEFAULT_ORDER: usize = 16;

/// How a cell sits in the chart.
#[derive(Debug, Clone)]
enum CellMap {
    Param(Vec<ScalarExpr>),
    Flowed {
        base: Box<CellMap>,
        flow: Arc<Flow>,
        time: f64,
    },
}

impl CellMap {
    fn face(&self, p: usize, axis: usize, end: u8) -> CellMap {
        match self {
            CellMap::Param(comps) => {
                let images: Vec<ScalarExpr> = (0..p)
                    .map(|j| match j.cmp(&axis) {
                        std::cmp::Ordering::Less => ScalarExpr::coord(j),
                        std::cmp::Ordering::Equal => ScalarExpr::int(end as i64),
                        std::cmp::Ordering::Greater => ScalarExpr::coord(j - 1),
                    })
                    .collect();
                CellMap::Param(comps.iter().map(|c| c.substitute_coords(&images)).collect())
            }
            CellMap::Flowed { base, flow, time } => CellMap::Flowed {
                base: Box::new(base.face(p, axis, end)),
                flow: flow.clone(),
                time: *time,
            },
        }
    }

    fn prepare(&self, p: usize, params: &Params) -> Result<Prepared> {
        Ok(match self {
            CellMap::Param(comps) => {
                let point = comps.iter().map(|c| BoundExpr::new(c, params)).collect::<Result<_>>()?;
                let mut jac = Vec::with_capacity(comps.len() * p);
                for c in comps {
                    for j in 0..p {
                        jac.push(BoundExpr::new(&c.differentiate(j), params)?);
                    }
                }
                Prepared::Param { point, jac }
            }
            CellMap::Flowed { base, flow, time } => Prepared::Flowed {
                base: Box::new(base.prepare(p, params)?),
                flow: flow.clone(),
                time: *time,
            },
        })
    }
}

/// Numeric form of a cell map.
enum Prepared {
    Param { point: Vec<BoundExpr>, jac: Vec<BoundExpr> },
    Flowed { base: Box<Prepared>, flow: Arc<Flow>, time: f64 },
}

impl Prepared {
    /// Image point and Jacobian (row-major, `n x p`) at cube point `s`.
    fn eval(&self, s: &[f64], stack: &mut Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Prepared::Param { point, jac } => {
                let x = point.iter().map(|e| e.eval_with(s, stack)).collect::<Result<_>>()?;
                let j = jac.iter().map(|e| e.eval_with(s, stack)).collect::<Result<_>>()?;
                Ok((x, j))
            }
            Prepared::Flowed { base, flow, time } => {
                let (x, j) = base.eval(s, stack)?;
                flow.transport(x, j, *time, stack)
            }
        }
    }
}

/// One oriented cell of a chain.
#[derive(Debug, Clone)]
pub struct Cell {
    map: CellMap,
    orientation: i8,
}

impl Cell {
    /// A cell from one expression per chart coordinate, written over
    /// [`Chart::cube`].
    pub fn new(components: Vec<ScalarExpr>, orientation: i8) -> Result<Self> {
        if orientation != 1 && orientation != -1 {
            return Err(Error::Usage("cell orientation must be +1 or -1".into()));
        }
        Ok(Self {
            map: CellMap::Param(components.into_iter().map(|c| c.simplify()).collect()),
            orientation,
        })
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    /// Symbolic components, if the cell has not been advected.
    pub fn components(&self) -> Option<&[ScalarExpr]> {
        match &self.map {
            CellMap::Param(c) => Some(c),
            CellMap::Flowed { .. } => None,
        }
    }

    pub fn is_advected(&self) -> bool {
        matches!(self.map, CellMap::Flowed { .. })
    }

    fn reversed(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }
}

/// A formal sum of oriented `p`-cells in a chart.
#[derive(Debug, Clone)]
pub struct Chain {
    chart: Arc<Chart>,
    degree: usize,
    cells: Vec<Cell>,
    order: usize,
    closed: bool,
    params: Params,
}

/// Result of integrating a form over a chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// `|I(2q) - I(q)|` for quadrature order `q`.
    pub error: f64,
    /// Integral of the absolute pulled-back density, the natural scale.
    pub magnitude: f64,
}

fn cube_expr_check(components: &[ScalarExpr], p: usize) -> Result<()> {
    for c in components {
        if let Some(k) = c.max_coord() {
            if k >= p {
                return Err(Error::Usage(format!(
                    "cell component uses cube coordinate s{k} but the cell has dimension {p}"
                )));
            }
        }
    }
    Ok(())
}

fn lift(center: &[f64], k: usize) -> ScalarExpr {
    ScalarExpr::float(center[k])
}

impl Chain {
    pub fn new(chart: &Arc<Chart>, degree: usize, cells: Vec<Cell>) -> Result<Self> {
        for cell in &cells {
            if let CellMap::Param(c) = &cell.map {
                if c.len() != chart.dim() {
                    return Err(Error::Usage(format!(
                        "cell has {} components, chart has {} coordinates",
                        c.len(),
                        chart.dim()
                    )));
                }
                cube_expr_check(c, degree)?;
            }
        }
        Ok(Self {
            chart: chart.clone(),
            degree,
            cells,
            order: DEFAULT_ORDER,
            closed: false,
            params: Params::new(),
        })
    }

    /// Declare the chain closed (a cycle).
    pub fn closed(mut self, closed: bool) -> Self {
        self.closed = closed;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order.max(1);
        self
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Formal sum with another chain of the same degree.
    pub fn plus(mut self, other: Chain) -> Result<Self> {
        if self.chart != other.chart || self.degree != other.degree {
            return Err(Error::Usage("chains differ in chart or degree".into()));
        }
        self.cells.extend(other.cells);
        self.closed = self.closed && other.closed;
        Ok(self)
    }

    pub fn reversed(mut self) -> Self {
        self.cells = self.cells.into_iter().map(Cell::reversed).collect();
        self
    }

    /// A single point as a 0-chain.
    pub fn point(chart: &Arc<Chart>, x: &[f64]) -> Result<Self> {
        let comps = (0..chart.dim()).map(|k| lift(x, k)).collect();
        Self::new(chart, 0, vec![Cell::new(comps, 1)?])
    }

    /// Circle of `radius` in the plane of `axes` around `center` (a full
    /// chart point), traversed `windings` times counter-clockwise. Each
    /// quarter turn is its own cell so the default quadrature resolves
    /// periodic integrands to near machine precision.
    pub fn circle(
        chart: &Arc<Chart>,
        axes: (usize, usize),
        center: &[f64],
        radius: f64,
        windings: i64,
    ) -> Result<Self> {
        check_point(chart, center)?;
        let turns = windings.unsigned_abs() as i64;
        let sign = if windings < 0 { -1 } else { 1 };
        let r = ScalarExpr::float(radius);
        let mut cells = Vec::new();
        for q in 0..4 * turns {
            let theta = ScalarExpr::int(sign) * sector_angle(q, ScalarExpr::coord(0));
            cells.push(Cell::new(planar(chart, axes, center, &r, &theta), 1)?);
        }
        Ok(Self::new(chart, 1, cells)?.closed(true))
    }

    /// Disk in polar parametrization, one cell per quadrant; its boundary
    /// is the counter-clockwise circle.
    pub fn disk(chart: &Arc<Chart>, axes: (usize, usize), center: &[f64], radius: f64) -> Result<Self> {
        check_point(chart, center)?;
        let rho = ScalarExpr::float(radius) * ScalarExpr::coord(0);
        let cells = (0..4)
            .map(|q| Cell::new(planar(chart, axes, center, &rho, &sector_angle(q, ScalarExpr::coord(1))), 1))
            .collect::<Result<_>>()?;
        Self::new(chart, 2, cells)
    }

    /// Round sphere in the 3-space spanned by `axes`, outward oriented, one
    /// cell per quarter of longitude.
    pub fn sphere(chart: &Arc<Chart>, axes: [usize; 3], center: &[f64], radius: f64) -> Result<Self> {
        check_point(chart, center)?;
        let th = ScalarExpr::pi() * ScalarExpr::coord(0);
        let r = ScalarExpr::float(radius);
        let mut cells = Vec::new();
        for q in 0..4 {
            let ph = sector_angle(q, ScalarExpr::coord(1));
            let dir = [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()];
            let comps = (0..chart.dim())
                .map(|k| match axes.iter().position(|&a| a == k) {
                    Some(i) => lift(center, k) + &r * &dir[i],
                    None => lift(center, k),
                })
                .collect();
            cells.push(Cell::new(comps, 1)?);
        }
        Ok(Self::new(chart, 2, cells)?.closed(true))
    }

    /// Axis-aligned box `origin + sum_i s_i * sides_i e_{axes_i}`.
    pub fn box_cell(chart: &Arc<Chart>, axes: &[usize], origin: &[f64], sides: &[f64]) -> Result<Self> {
        check_point(chart, origin)?;
        if axes.len() != sides.len() {
            return Err(Error::Usage("one side length per axis".into()));
        }
        let comps = (0..chart.dim())
            .map(|k| match axes.iter().position(|&a| a == k) {
                Some(i) => lift(origin, k) + ScalarExpr::float(sides[i]) * ScalarExpr::coord(i),
                None => lift(origin, k),
            })
            .collect();
        Self::new(chart, axes.len(), vec![Cell::new(comps, 1)?])
    }

    /// Cubical boundary: `sum_i sum_e (-1)^(i+1+e) face(i, e)`.
    pub fn boundary(&self) -> Result<Chain> {
        if self.degree == 0 {
            return Err(Error::Usage("a 0-chain has no boundary".into()));
        }
        let p = self.degree;
        let mut cells = Vec::new();
        for cell in &self.cells {
            for axis in 0..p {
                for end in 0..2u8 {
                    let sign = if (axis + 1 + end as usize) % 2 == 0 { 1 } else { -1 };
                    cells.push(Cell {
                        map: cell.map.face(p, axis, end),
                        orientation: cell.orientation * sign,
                    });
                }
            }
        }
        Ok(Chain {
            chart: self.chart.clone(),
            degree: p - 1,
            cells,
            order: self.order,
            closed: true,
            params: self.params.clone(),
        })
    }

    /// Value and magnitude of the integral at one quadrature order.
    pub fn integrate_at(&self, w: &DifferentialForm, order: usize) -> Result<(f64, f64)> {
        self.check_form(w)?;
        let terms: Vec<(Vec<usize>, BoundExpr)> = w
            .terms()
            .map(|(idx, c)| Ok((idx.clone(), BoundExpr::new(c, &self.params)?)))
            .collect::<Result<_>>()?;
        if terms.is_empty() {
            return Ok((0.0, 0.0));
        }
        let rule = quadrature(order)?;
        let p = self.degree;
        let mut stack = Vec::with_capacity(32);
        let mut total = 0.0;
        let mut magnitude = 0.0;
        for (id, cell) in self.cells.iter().enumerate() {
            let wrap = |e: Error| Error::Cell {
                cell: id,
                source: Box::new(e),
            };
            let prepared = cell.map.prepare(p, &self.params).map_err(wrap)?;
            let mut sum = 0.0;
            let mut abs = 0.0;
            for (s, weight) in tensor_nodes(&rule, p) {
                let (x, jac) = prepared.eval(&s, &mut stack).map_err(wrap)?;
                for (idx, coeff) in &terms {
                    let c = coeff.eval_with(&x, &mut stack).map_err(wrap)?;
                    let dens = c * minor(&jac, p, idx);
                    sum += weight * dens;
                    abs += weight * dens.abs();
                }
            }
            total += cell.orientation as f64 * sum;
            magnitude += abs;
        }
        Ok((total, magnitude))
    }

    pub fn integrate(&self, w: &DifferentialForm) -> Result<Integral> {
        let (value, magnitude) = self.integrate_at(w, self.order)?;
        let (fine, _) = self.integrate_at(w, 2 * self.order)?;
        Ok(Integral {
            value,
            error: (fine - value).abs(),
            magnitude,
        })
    }

    /// Compose every cell with the time-`dt` flow of `v`.
    pub fn advect(&self, v: &VectorField, dt: f64) -> Result<Chain> {
        self.advect_with_step(v, dt, DEFAULT_MAX_STEP)
    }

    pub fn advect_with_step(&self, v: &VectorField, dt: f64, max_step: f64) -> Result<Chain> {
        if v.chart() != &self.chart {
            return Err(Error::Usage("vector field and chain live on different charts".into()));
        }
        let flow = Arc::new(Flow::new(v, &self.params, max_step)?);
        Ok(self.advect_by(&flow, dt))
    }

    pub(crate) fn advect_by(&self, flow: &Arc<Flow>, dt: f64) -> Chain {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell {
                map: match &c.map {
                    CellMap::Flowed { base, flow: f, time } if Arc::ptr_eq(f, flow) => CellMap::Flowed {
                        base: base.clone(),
                        flow: flow.clone(),
                        time: time + dt,
                    },
                    m => CellMap::Flowed {
                        base: Box::new(m.clone()),
                        flow: flow.clone(),
                        time: dt,
                    },
                },
                orientation: c.orientation,
            })
            .collect();
        Chain {
            chart: self.chart.clone(),
            degree: self.degree,
            cells,
            order: self.order,
            closed: self.closed,
            params: self.params.clone(),
        }
    }

    /// Image points of the quadrature nodes, cell by cell.
    pub fn node_images(&self) -> Result<Vec<Vec<f64>>> {
        let rule = quadrature(self.order)?;
        let mut stack = Vec::new();
        let mut out = Vec::new();
        for cell in &self.cells {
            let prepared = cell.map.prepare(self.degree, &self.params)?;
            for (s, _) in tensor_nodes(&rule, self.degree) {
                out.push(prepared.eval(&s, &mut stack)?.0);
            }
        }
        Ok(out)
    }

    /// Spot check of closedness: integrals of three random exact forms
    /// must vanish relative to their magnitude. Returns the worst ratio.
    pub fn closedness_residual(&self, seed: u64) -> Result<f64> {
        if self.degree == 0 {
            return Err(Error::Usage("closedness is checked on chains of degree >= 1".into()));
        }
        let n = self.chart.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0f64;
        for _ in 0..3 {
            let mut phi = vec![ScalarExpr::float(rng.random_range(-1.0..1.0))];
            for i in 0..n {
                phi.push(ScalarExpr::float(rng.random_range(-1.0..1.0)) * ScalarExpr::coord(i));
                for j in i..n {
                    phi.push(
                        ScalarExpr::float(rng.random_range(-1.0..1.0))
                            * ScalarExpr::coord(i)
                            * ScalarExpr::coord(j),
                    );
                }
            }
            let phi = ScalarExpr::sum(phi).simplify();
            let mut axes: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                axes.swap(i, rng.random_range(0..=i));
            }
            axes.truncate(self.degree - 1);
            let eta = DifferentialForm::basis(&self.chart, &axes)?.scale(&phi);
            let (v, m) = self.integrate_at(&eta.d(), self.order)?;
            if m > 0.0 {
                worst = worst.max(v.abs() / m);
            }
        }
        Ok(worst)
    }

    fn check_form(&self, w: &DifferentialForm) -> Result<()> {
        if w.chart() != &self.chart {
            return Err(Error::Usage("form and chain live on different charts".into()));
        }
        if w.degree() != self.degree {
            return Err(Error::Usage(format!(
                "cannot integrate a {}-form over a {}-chain",
                w.degree(),
                self.degree
            )));
        }
        Ok(())
    }
}

/// `(q + s) * pi / 2`: the angle along quarter turn `q`.
fn sector_angle(q: i64, s: ScalarExpr) -> ScalarExpr {
    (ScalarExpr::int(q) + s) * ScalarExpr::pi() / ScalarExpr::int(2)
}

/// `center + r (cos theta e_a + sin theta e_b)`.
fn planar(chart: &Chart, axes: (usize, usize), center: &[f64], r: &ScalarExpr, theta: &ScalarExpr) -> Vec<ScalarExpr> {
    (0..chart.dim())
        .map(|k| {
            if k == axes.0 {
                lift(center, k) + r * theta.cos()
            } else if k == axes.1 {
                lift(center, k) + r * theta.sin()
            } else {
                lift(center, k)
            }
        })
        .collect()
}

fn check_point(chart: &Chart, x: &[f64]) -> Result<()> {
    if x.len() == chart.dim() {
        Ok(())
    } else {
        Err(Error::Usage(format!(
            "point has {} coordinates, chart has {}",
            x.len(),
            chart.dim()
        )))
    }
}

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
fn quadrature(order: usize) -> Result<Vec<(f64, f64)>> {
    if order < 2 {
        return Ok(vec![(0.5, 1.0)]);
    }
    let rule = GaussLegendre::new(order).map_err(|e| Error::Usage(format!("quadrature: {e}")))?;
    Ok(rule
        .as_node_weight_pairs()
        .iter()
        .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect())
}

fn tensor_nodes(rule: &[(f64, f64)], p: usize) -> impl Iterator<Item = (Vec<f64>, f64)> + '_ {
    let q = rule.len();
    let count = q.pow(p as u32);
    (0..count).map(move |mut m| {
        let mut s = Vec::with_capacity(p);
        let mut w = 1.0;
        for _ in 0..p {
            let (x, wx) = rule[m % q];
            s.push(x);
            w *= wx;
            m /= q;
        }
        (s, w)
    })
}

/// Determinant of the rows `idx` of the `n x p` Jacobian.
fn minor(jac: &[f64], p: usize, idx: &[usize]) -> f64 {
    let mut m: Vec<f64> = idx.iter().flat_map(|&r| jac[r * p..(r + 1) * p].iter().copied()).collect();
    det(&mut m, p)
}

fn det(m: &mut [f64], p: usize) -> f64 {
    let mut d = 1.0;
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&a, &b| m[a * p + col].abs().total_cmp(&m[b * p + col].abs()))
            .unwrap();
        if m[pivot * p + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..p {
                m.swap(pivot * p + k, col * p + k);
            }
            d = -d;
        }
        let piv = m[col * p + col];
        d *= piv;
        for r in col + 1..p {
            let f = m[r * p + col] / piv;
            for k in col..p {
                m[r * p + k] -= f * m[col * p + k];
            }
        }
    }
    d
}

/// Whether an invariance check needs a closed chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceMode {
    /// Integral over an arbitrary chain.
    Absolute,
    /// Integral over a closed cycle.
    Relative,
}

/// Relative threshold for calling a derivative zero.
pub const INVARIANCE_TOL: f64 = 1e-6;
/// Relative threshold for the transport identity.
pub const TRANSPORT_TOL: f64 = 1e-5;
/// Absolute floor under both thresholds: quadrature roundoff on a chain
/// where the form integrates to nothing.
pub const ROUNDOFF_FLOOR: f64 = 1e-10;
/// Differencing step in flow time.
pub const DIFF_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// Richardson estimate of `d/dt` of the integral over the moving chain.
    pub derivative: f64,
    /// `int_C L(V) w`.
    pub lie_integral: f64,
    /// `int_C |w|`.
    pub scale: f64,
    /// `|derivative| <= tolerance()`.
    pub invariant: bool,
    /// `|derivative - lie_integral| / max(|lie_integral|, tolerance())`.
    pub transport_error: f64,
}

impl InvarianceReport {
    /// `INVARIANCE_TOL * scale`, never below the roundoff floor.
    pub fn tolerance(&self) -> f64 {
        invariance_tolerance(self.scale)
    }

    pub fn transport_holds(&self) -> bool {
        self.transport_error <= TRANSPORT_TOL
    }
}

fn invariance_tolerance(scale: f64) -> f64 {
    (INVARIANCE_TOL * scale).max(ROUNDOFF_FLOOR)
}

/// Compare the rate of change of `int_{C(t)} w` with `int_C L(V) w`.
pub fn invariance_check(
    w: &DifferentialForm,
    c: &Chain,
    v: &VectorField,
    mode: InvarianceMode,
) -> Result<InvarianceReport> {
    if mode == InvarianceMode::Relative && !c.closed {
        return Err(Error::Usage("relative invariance needs a chain declared closed".into()));
    }
    c.check_form(w)?;
    let flow = Arc::new(Flow::new(v, &c.params, DEFAULT_MAX_STEP)?);
    let at = |t: f64| -> Result<f64> { Ok(c.advect_by(&flow, t).integrate_at(w, c.order)?.0) };
    let h = DIFF_STEP;
    let d1 = (at(h)? - at(-h)?) / (2.0 * h);
    let d2 = (at(2.0 * h)? - at(-2.0 * h)?) / (4.0 * h);
    let derivative = (4.0 * d1 - d2) / 3.0;
    let (_, scale) = c.integrate_at(w, c.order)?;
    let (lie_integral, _) = c.integrate_at(&w.lie_derivative(v)?, c.order)?;
    let floor = invariance_tolerance(scale);
    Ok(InvarianceReport {
        derivative,
        lie_integral,
        scale,
        invariant: derivative.abs() <= floor,
        transport_error: (derivative - lie_integral).abs() / lie_integral.abs().max(floor),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSpectrum {
    pub periods: Vec<f64>,
    /// Smallest nonzero `|period|`, if any.
    pub unit: Option<f64>,
    /// `period / unit` for each cycle.
    pub ratios: Vec<f64>,
    /// Largest distance of a ratio from the nearest integer.
    pub max_deviation: f64,
}

/// Periods of a closed 1-form (or any closed form) over declared cycles.
pub fn period_spectrum(w: &DifferentialForm, cycles: &[Chain], domain: &SamplingBox) -> Result<PeriodSpectrum> {
    if !w.d().is_zero(domain)?.is_zero() {
        return Err(Error::Usage("period spectrum needs a closed form".into()));
    }
    let mut periods = Vec::new();
    let mut unit: Option<f64> = None;
    for c in cycles {
        let (v, m) = c.integrate_at(w, c.order)?;
        let v = if v.abs() <= 1e-12 * m.max(1.0) { 0.0 } else { v };
        if v != 0.0 {
            unit = Some(unit.map_or(v.abs(), |u| u.min(v.abs())));
        }
        periods.push(v);
    }
    let ratios: Vec<f64> = match unit {
        Some(u) => periods.iter().map(|p| p / u).collect(),
        None => vec![0.0; periods.len()],
    };
    let max_deviation = ratios.iter().fold(0.0f64, |m, r| m.max((r - r.round()).abs()));
    Ok(PeriodSpectrum {
        periods,
        unit,
        ratios,
        max_deviation,
    })
}
