//! Process analysis of an action 1-form `A` under a process field `J`:
//! the first law `L(J)A = W + dU = Q`, classification of the process, the
//! irreversibility criterion `Q^dQ != 0`, and the second variation `L(J)Q`.

use crate::chains::Chain;
use crate::error::{Error, Result};
use crate::expr::{SamplingBox, ScalarExpr};
use crate::forms::{DifferentialForm, VectorField};
use crate::pfaff::{self, TorsionData};

/// Periods below this fraction of `int |W|` count as zero.
pub const PERIOD_TOL: f64 = 1e-8;

/// Threshold for a period whose absolute integrand integrates to `magnitude`.
pub fn period_tolerance(magnitude: f64) -> f64 {
    (PERIOD_TOL * magnitude).max(crate::chains::ROUNDOFF_FLOOR)
}

/// `Q = W + dU` with `W = i(J)dA` and `U = i(J)A`.
#[derive(Debug, Clone)]
pub struct FirstLaw {
    pub q: DifferentialForm,
    pub w: DifferentialForm,
    pub u: ScalarExpr,
}

pub fn first_law(a: &DifferentialForm, j: &VectorField) -> Result<FirstLaw> {
    if a.degree() != 1 {
        return Err(Error::Usage("the first law needs a 1-form action".into()));
    }
    let w = a.d().interior(j)?;
    let u_form = a.interior(j)?;
    let u = u_form.coeff(&[]);
    let q = w.try_add(&u_form.d())?;
    let lie = a.lie_derivative(j)?;
    if !q.try_sub(&lie)?.is_syntactically_zero() {
        return Err(Error::Consistency("W + dU differs from L(J)A".into()));
    }
    Ok(FirstLaw { q, w, u })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    /// `W = 0`.
    Hamiltonian,
    /// `dW = 0` and every registered period of `W` vanishes.
    EulerBernoulli,
    /// `dW = 0` with a nonzero period.
    Stokes,
    /// `dW = 0` but no cycles were registered to decide exactness.
    ClosedUndetermined,
    /// `dW != 0`.
    Open,
}

impl Category {
    pub fn name(self) -> &'static str {
        match self {
            Category::Hamiltonian => "hamiltonian",
            Category::EulerBernoulli => "euler-bernoulli",
            Category::Stokes => "stokes",
            Category::ClosedUndetermined => "closed (exactness undetermined)",
            Category::Open => "open",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProcessReport {
    pub law: FirstLaw,
    pub dq: DifferentialForm,
    pub q_dq: DifferentialForm,
    /// Pfaff dimension of `Q` over the sampling box.
    pub q_pfaff_dimension: usize,
    pub adiabatic: bool,
    pub closed_flow: bool,
    pub reversible: bool,
    pub associated: bool,
    pub extremal: bool,
    pub characteristic: bool,
    /// `L(J)Q != 0`.
    pub radiative: bool,
    pub radiation: DifferentialForm,
    pub category: Category,
    /// `(cycle name, period of W)`.
    pub work_periods: Vec<(String, f64)>,
}

impl ProcessReport {
    pub fn open_flow(&self) -> bool {
        !self.closed_flow
    }

    pub fn irreversible(&self) -> bool {
        !self.reversible
    }
}

fn zero(w: &DifferentialForm, domain: &SamplingBox) -> Result<bool> {
    Ok(w.is_zero(domain)?.is_zero())
}

/// Period of a 1-form over a cycle and whether it is negligible against
/// the integral of `|w|`.
fn period(w: &DifferentialForm, c: &Chain) -> Result<(f64, bool)> {
    let (v, m) = c.integrate_at(w, c.order())?;
    Ok((v, v.abs() <= period_tolerance(m)))
}

/// Classify the process `J` acting on `A`. `cycles` are the registered
/// closed 1-chains used to decide whether a closed `W` is exact.
pub fn classify(
    a: &DifferentialForm,
    j: &VectorField,
    domain: &SamplingBox,
    cycles: &[(String, Chain)],
) -> Result<ProcessReport> {
    let law = first_law(a, j)?;
    let dq = law.q.d();
    let q_dq = law.q.wedge(&dq)?;
    let q_pfaff_dimension = pfaff::pfaff_sequence(&law.q, domain)?.dimension;
    let adiabatic = zero(&law.q, domain)?;
    let closed_flow = zero(&dq, domain)?;
    let reversible = zero(&q_dq, domain)?;
    let associated = matches!(law.u.is_zero(domain)?, crate::expr::ZeroVerdict::Zero);
    let extremal = zero(&law.w, domain)?;
    let radiation = law.q.lie_derivative(j)?;
    let radiative = !zero(&radiation, domain)?;

    let mut work_periods = Vec::new();
    let mut all_vanish = true;
    if closed_flow && !extremal {
        for (name, c) in cycles {
            let (v, negligible) = period(&law.w, c)?;
            all_vanish &= negligible;
            work_periods.push((name.clone(), v));
        }
    }
    let category = if extremal {
        Category::Hamiltonian
    } else if !closed_flow {
        Category::Open
    } else if cycles.is_empty() {
        Category::ClosedUndetermined
    } else if all_vanish {
        Category::EulerBernoulli
    } else {
        Category::Stokes
    };
    Ok(ProcessReport {
        law,
        dq,
        q_dq,
        q_pfaff_dimension,
        adiabatic,
        closed_flow,
        reversible,
        associated,
        extremal,
        characteristic: associated && extremal,
        radiative,
        radiation,
        category,
        work_periods,
    })
}

/// `Q^dQ` and whether it vanishes.
pub fn irreversibility(
    a: &DifferentialForm,
    j: &VectorField,
    domain: &SamplingBox,
) -> Result<(DifferentialForm, bool)> {
    let law = first_law(a, j)?;
    let q_dq = law.q.wedge(&law.q.d())?;
    let reversible = zero(&q_dq, domain)?;
    Ok((q_dq, reversible))
}

/// The torsion-vector process `J = T` on a 4-chart action.
#[derive(Debug, Clone)]
pub struct TorsionProcess {
    pub torsion: TorsionData,
    pub report: ProcessReport,
    /// `Q - Gamma A` vanishes.
    pub heat_is_gamma_a: bool,
    /// `Q^dQ - Gamma^2 A^dA` vanishes.
    pub q_dq_matches: bool,
}

pub fn torsion_process(a: &DifferentialForm, domain: &SamplingBox, cycles: &[(String, Chain)]) -> Result<TorsionProcess> {
    let torsion = pfaff::torsion_data(a, domain)?;
    let report = classify(a, &torsion.vector, domain, cycles)?;
    let gamma = &torsion.gamma;
    let heat_is_gamma_a = zero(&report.law.q.try_sub(&a.scale(gamma))?, domain)?;
    let g2 = (gamma * gamma).simplify();
    let q_dq_matches = zero(&report.q_dq.try_sub(&torsion.torsion.scale(&g2))?, domain)?;
    Ok(TorsionProcess {
        torsion,
        report,
        heat_is_gamma_a,
        q_dq_matches,
    })
}

#[derive(Debug, Clone)]
pub struct SecondVariation {
    /// `R = L(J)Q`.
    pub r: DifferentialForm,
    pub dq_zero: bool,
    pub dr_zero: bool,
    /// `(cycle name, period of R)`.
    pub periods: Vec<(String, f64)>,
    pub periods_vanish: bool,
    /// `L(J)(Q^F)`.
    pub lie_q_f: DifferentialForm,
    /// `d(Gamma' dA)` with `Gamma' = i(J)Q`.
    pub exact_candidate: DifferentialForm,
    /// `L(J)(Q^F) = d(Gamma' dA)`; expected whenever `dQ = 0`.
    pub q_f_exact: bool,
}

pub fn second_variation(
    a: &DifferentialForm,
    j: &VectorField,
    domain: &SamplingBox,
    cycles: &[(String, Chain)],
) -> Result<SecondVariation> {
    let law = first_law(a, j)?;
    let r = law.q.lie_derivative(j)?;
    let dq_zero = zero(&law.q.d(), domain)?;
    let dr_zero = zero(&r.d(), domain)?;
    let mut periods = Vec::new();
    let mut periods_vanish = true;
    for (name, c) in cycles {
        let (v, negligible) = period(&r, c)?;
        periods_vanish &= negligible;
        periods.push((name.clone(), v));
    }
    let f = a.d();
    let lie_q_f = law.q.wedge(&f)?.lie_derivative(j)?;
    let gamma_prime = law.q.interior(j)?;
    let exact_candidate = gamma_prime.wedge(&f)?.d();
    let q_f_exact = zero(&lie_q_f.try_sub(&exact_candidate)?, domain)?;
    Ok(SecondVariation {
        r,
        dq_zero,
        dr_zero,
        periods,
        periods_vanish,
        lie_q_f,
        exact_candidate,
        q_f_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::expr::parse_expr;

    fn sbox() -> SamplingBox {
        SamplingBox::cube(4, -1.5, 1.5)
    }

    fn form(comps: &[&str]) -> DifferentialForm {
        let c = Chart::spacetime();
        DifferentialForm::one_form(&c, comps.iter().map(|s| parse_expr(s, &c).unwrap()).collect()).unwrap()
    }

    fn field(comps: &[&str]) -> VectorField {
        let c = Chart::spacetime();
        VectorField::new(&c, comps.iter().map(|s| parse_expr(s, &c).unwrap()).collect()).unwrap()
    }

    #[test]
    fn adiabatic_when_both_terms_vanish() {
        // A = dz - y dx, J = d/dt: i(J)dA = 0, i(J)A = 0.
        let a = form(&["-y", "0", "1", "0"]);
        let r = classify(&a, &field(&["0", "0", "0", "1"]), &sbox(), &[]).unwrap();
        assert!(r.adiabatic && r.characteristic && r.reversible && !r.radiative);
        assert_eq!(r.category, Category::Hamiltonian);
    }

    #[test]
    fn extremal_but_not_associated() {
        // J = d/dz has i(J)dA = 0 and i(J)A = 1: Q = 0 still.
        let a = form(&["-y", "0", "1", "0"]);
        let r = classify(&a, &field(&["0", "0", "1", "0"]), &sbox(), &[]).unwrap();
        assert!(r.extremal && !r.associated && r.adiabatic);
    }

    #[test]
    fn first_law_identity() {
        let a = form(&["x*t", "sin(y*z)", "exp(-x)", "x + y"]);
        let j = field(&["y", "1", "x*t", "z"]).with_support(parse_expr("1 + x^2", &Chart::spacetime()).unwrap());
        let law = first_law(&a, &j).unwrap();
        assert!(law.w.interior(&j).unwrap().is_syntactically_zero());
        assert!(law.q.try_sub(&law.w).unwrap().try_sub(&DifferentialForm::scalar(a.chart(), law.u.clone()).d()).unwrap().is_syntactically_zero());
    }

    #[test]
    fn torsion_process_is_irreversible() {
        let a = form(&["-y", "x", "0", "-z/2"]);
        let p = torsion_process(&a, &sbox(), &[]).unwrap();
        assert!(p.heat_is_gamma_a && p.q_dq_matches);
        assert!(p.report.irreversible() && p.report.open_flow());
        assert_eq!(p.report.category, Category::Open);
        let (_, reversible) = irreversibility(&a, &p.torsion.vector, &sbox()).unwrap();
        assert!(!reversible);
    }

    #[test]
    fn caratheodory_form_is_reversible() {
        // The dilation x d/dx on A = x dy has heat Q = x dy: Pfaff
        // dimension 2, an integrating factor exists.
        let a = form(&["0", "x", "0", "0"]);
        let r = classify(&a, &field(&["x", "0", "0", "0"]), &sbox(), &[]).unwrap();
        assert_eq!(r.law.q, a);
        assert!(r.reversible && !r.closed_flow && r.q_pfaff_dimension == 2);
    }

    #[test]
    fn hamiltonian_second_variation_is_exact() {
        let a = form(&["-y", "0", "1", "0"]);
        let j = field(&["0", "0", "1", "0"]).with_support(parse_expr("x^2 + 1", &Chart::spacetime()).unwrap());
        let s = second_variation(&a, &j, &sbox(), &[]).unwrap();
        assert!(s.dq_zero && s.dr_zero && s.q_f_exact);
    }
}
