//! Model systems: the kinematic fluid action `A = v.dr - H dt` and the
//! electromagnetic action `A = a.dr - phi dt`, with their derived fields,
//! residuals and balance laws.
//!
//! Sign conventions, in the orientation `dx^dy^dz^dt` used throughout:
//! the parity coefficient of the fluid action is `+2 a.w` and of the
//! electromagnetic action `+2 E.B`; the mass current `J` satisfies
//! `dJ = -(div(rho v) + d(rho)/dt) Omega`; the viscous term enters the
//! momentum balance as `... = -grad P_rho - nu curl curl v`, so on a
//! Navier-Stokes solution `k = +2 nu w.curl w`.

pub mod presets;
pub mod vector;

use std::sync::Arc;

use crate::chains::Chain;
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::expr::{SamplingBox, ScalarExpr, ZeroVerdict};
use crate::forms::{DifferentialForm, VectorField};
use crate::pfaff::{self, GenusReport};
use crate::thermo::{self, TorsionProcess};

use vector::Vec3;

pub use presets::{preset, preset_names, Model, Scenario};

fn zero(e: &ScalarExpr, domain: &SamplingBox) -> Result<bool> {
    Ok(matches!(e.is_zero(domain)?, ZeroVerdict::Zero))
}

fn zero3(v: &Vec3, domain: &SamplingBox) -> Result<bool> {
    for c in v {
        if !zero(c, domain)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn form_zero(w: &DifferentialForm, domain: &SamplingBox) -> Result<bool> {
    Ok(w.is_zero(domain)?.is_zero())
}

/// `sum_i c_i (dx^i - v^i dt)`.
fn transversal(chart: &Arc<Chart>, c: &Vec3, v: &Vec3) -> Result<DifferentialForm> {
    let time = -vector::dot(c, v);
    DifferentialForm::one_form(chart, vec![c[0].clone(), c[1].clone(), c[2].clone(), time])
}

/// Kinematic fluid: velocity, barotropic potential `P_rho = int dP/rho`,
/// and kinematic viscosity.
#[derive(Debug, Clone)]
pub struct FluidSystem {
    chart: Arc<Chart>,
    v: Vec3,
    p_rho: ScalarExpr,
    nu: ScalarExpr,
}

#[derive(Debug, Clone)]
pub struct VorticityFields {
    /// `w = curl v`.
    pub omega: Vec3,
    /// `a = -dv/dt - grad H`.
    pub accel: Vec3,
    /// `F` assembled from `w` and `a`.
    pub f: DifferentialForm,
}

#[derive(Debug, Clone)]
pub struct NavierStokes {
    /// `dv/dt + grad(v^2/2) - v x w + grad P_rho + nu curl curl v`.
    pub residual: Vec3,
    pub is_solution: bool,
    /// `-nu (curl w)_i (dx^i - v^i dt)`.
    pub work: DifferentialForm,
    /// The work form above equals `i(v,1) dA`.
    pub work_matches_first_law: bool,
}

#[derive(Debug, Clone)]
pub struct TorsionCurrent {
    /// `a x v + H w`.
    pub current: Vec3,
    /// `v.w`.
    pub helicity: ScalarExpr,
    /// `-2 a.w`.
    pub anomaly: ScalarExpr,
    /// `div T + dh/dt = -2 a.w`.
    pub balance_holds: bool,
    /// Agrees with the torsion vector read off `A^dA`.
    pub matches_torsion_vector: bool,
}

#[derive(Debug, Clone)]
pub struct EngineeringTorsion {
    /// `h v - L curl v - nu v x curl curl v` with `L = v^2/2 - P_rho`.
    pub formula: Vec3,
    /// `a x v + H w`.
    pub direct: Vec3,
    pub agrees: bool,
    /// False when the velocity does not solve the Navier-Stokes balance;
    /// both expressions are still returned.
    pub is_solution: bool,
}

impl FluidSystem {
    pub fn new(v: Vec3, p_rho: ScalarExpr, nu: ScalarExpr) -> Self {
        Self {
            chart: Chart::spacetime(),
            v: vector::simplify(&v),
            p_rho: p_rho.simplify(),
            nu: nu.simplify(),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn velocity(&self) -> &Vec3 {
        &self.v
    }

    pub fn pressure_potential(&self) -> &ScalarExpr {
        &self.p_rho
    }

    pub fn viscosity(&self) -> &ScalarExpr {
        &self.nu
    }

    /// `H = v.v/2 + P_rho`.
    pub fn hamiltonian(&self) -> ScalarExpr {
        (vector::dot(&self.v, &self.v) / ScalarExpr::int(2) + &self.p_rho).simplify()
    }

    /// `A = v.dr - H dt`.
    pub fn action(&self) -> DifferentialForm {
        let [vx, vy, vz] = self.v.clone();
        DifferentialForm::one_form(&self.chart, vec![vx, vy, vz, -self.hamiltonian()]).expect("four components")
    }

    /// The space-time flow `(v, 1)`.
    pub fn flow_field(&self) -> VectorField {
        let [vx, vy, vz] = self.v.clone();
        VectorField::new(&self.chart, vec![vx, vy, vz, ScalarExpr::one()]).expect("four components")
    }

    pub fn omega(&self) -> Vec3 {
        vector::simplify(&vector::curl(&self.v))
    }

    pub fn accel(&self) -> Vec3 {
        vector::neg(&vector::add(&vector::dt(&self.v), &vector::grad(&self.hamiltonian())))
    }

    /// `w`, `a` and `F`; checks `F = dA`, `curl a + dw/dt = 0`, `div w = 0`.
    pub fn vorticity_fields(&self, domain: &SamplingBox) -> Result<VorticityFields> {
        let omega = self.omega();
        let accel = self.accel();
        let f = DifferentialForm::new(
            &self.chart,
            2,
            [
                (vec![0, 1], omega[2].clone()),
                (vec![1, 2], omega[0].clone()),
                (vec![2, 0], omega[1].clone()),
                (vec![0, 3], accel[0].clone()),
                (vec![1, 3], accel[1].clone()),
                (vec![2, 3], accel[2].clone()),
            ],
        )?;
        if !form_zero(&f.try_sub(&self.action().d())?, domain)? {
            return Err(Error::Consistency("assembled F differs from dA".into()));
        }
        let induction = vector::add(&vector::curl(&accel), &vector::dt(&omega));
        if !zero3(&induction, domain)? || !zero(&vector::div(&omega), domain)? {
            return Err(Error::Consistency("induction identities failed".into()));
        }
        Ok(VorticityFields { omega, accel, f })
    }

    /// `dv/dt + grad(v^2/2) - v x w + grad P_rho`.
    pub fn euler_residual(&self) -> Vec3 {
        let half = (vector::dot(&self.v, &self.v) / ScalarExpr::int(2)).simplify();
        let lhs = vector::sub(
            &vector::add(&vector::dt(&self.v), &vector::grad(&half)),
            &vector::cross(&self.v, &self.omega()),
        );
        vector::add(&lhs, &vector::grad(&self.p_rho))
    }

    pub fn curl_omega(&self) -> Vec3 {
        vector::simplify(&vector::curl(&self.omega()))
    }

    pub fn navier_stokes(&self, domain: &SamplingBox) -> Result<NavierStokes> {
        let cw = self.curl_omega();
        let residual = vector::add(&self.euler_residual(), &vector::scale(&self.nu, &cw));
        let is_solution = zero3(&residual, domain)?;
        let work = transversal(&self.chart, &vector::neg(&vector::scale(&self.nu, &cw)), &self.v)?;
        let law = thermo::first_law(&self.action(), &self.flow_field())?;
        let work_matches_first_law = form_zero(&law.w.try_sub(&work)?, domain)?;
        Ok(NavierStokes {
            residual,
            is_solution,
            work,
            work_matches_first_law,
        })
    }

    pub fn torsion_current(&self, domain: &SamplingBox) -> Result<TorsionCurrent> {
        let omega = self.omega();
        let accel = self.accel();
        let h = self.hamiltonian();
        let current = vector::add(&vector::cross(&accel, &self.v), &vector::scale(&h, &omega));
        let helicity = vector::dot(&self.v, &omega);
        let anomaly = (ScalarExpr::int(-2) * vector::dot(&accel, &omega)).simplify();
        let balance = vector::div(&current) + helicity.differentiate(3) - &anomaly;
        let balance_holds = zero(&balance, domain)?;
        let t = pfaff::torsion_vector(&self.action().wedge(&self.action().d())?)?;
        let c = t.components();
        let mut matches = zero(&(&helicity + &c[3]), domain)?;
        for i in 0..3 {
            matches &= zero(&(&current[i] + &c[i]), domain)?;
        }
        Ok(TorsionCurrent {
            current,
            helicity,
            anomaly,
            balance_holds,
            matches_torsion_vector: matches,
        })
    }

    pub fn ns_engineering_torsion(&self, domain: &SamplingBox) -> Result<EngineeringTorsion> {
        let omega = self.omega();
        let helicity = vector::dot(&self.v, &omega);
        let lagrangian = (vector::dot(&self.v, &self.v) / ScalarExpr::int(2) - &self.p_rho).simplify();
        let viscous = vector::scale(&self.nu, &vector::cross(&self.v, &self.curl_omega()));
        let formula = vector::sub(
            &vector::sub(&vector::scale(&helicity, &self.v), &vector::scale(&lagrangian, &omega)),
            &viscous,
        );
        let direct = self.torsion_current(domain)?.current;
        let agrees = zero3(&vector::sub(&formula, &direct), domain)?;
        let is_solution = self.navier_stokes(domain)?.is_solution;
        Ok(EngineeringTorsion {
            formula,
            direct,
            agrees,
            is_solution,
        })
    }

    /// Parity coefficient of the action and `2 nu w.curl w`; on a solution
    /// they agree.
    pub fn viscous_parity(&self, domain: &SamplingBox) -> Result<(ScalarExpr, ScalarExpr, bool)> {
        let (_, k) = pfaff::parity(&self.action())?;
        let viscous = (ScalarExpr::int(2) * &self.nu * vector::dot(&self.omega(), &self.curl_omega())).simplify();
        let agree = zero(&(&k - &viscous), domain)?;
        Ok((k, viscous, agree))
    }

    /// `L(V) F` vanishes (vorticity is frozen into the flow).
    pub fn helmholtz(&self, domain: &SamplingBox) -> Result<bool> {
        form_zero(&self.action().d().lie_derivative(&self.flow_field())?, domain)
    }

    /// `div(k v) + dk/dt` for the parity coefficient `k`, and whether it
    /// equals the coefficient of `L(V) K`.
    pub fn parity_continuity(&self, domain: &SamplingBox) -> Result<(ScalarExpr, bool)> {
        let (big_k, k) = pfaff::parity(&self.action())?;
        let residual = (vector::div(&vector::scale(&k, &self.v)) + k.differentiate(3)).simplify();
        let lie = big_k.lie_derivative(&self.flow_field())?;
        let expected = DifferentialForm::volume(&self.chart).scale(&residual);
        Ok((residual, form_zero(&lie.try_sub(&expected)?, domain)?))
    }

    /// `i(rho V) dH` for `H = A^dA`, compared with the transversal mass
    /// current of the same density.
    pub fn torsion_mass_comparison(&self, rho: &ScalarExpr, domain: &SamplingBox) -> Result<(DifferentialForm, bool)> {
        let a = self.action();
        let dh = a.wedge(&a.d())?.d();
        let contracted = dh.interior(&self.flow_field().with_support(rho.clone()))?;
        let mc = mass_current(rho, &self.v, domain)?;
        let equal = form_zero(&contracted.try_sub(&mc.j)?, domain)?;
        Ok((contracted, equal))
    }
}

#[derive(Debug, Clone)]
pub struct MassCurrent {
    /// `rho (dx - v^x dt)^(dy - v^y dt)^(dz - v^z dt)`.
    pub j: DifferentialForm,
    /// `div(rho v) + d(rho)/dt`.
    pub residual: ScalarExpr,
    /// `dJ + residual * Omega` vanishes.
    pub identity_holds: bool,
}

pub fn mass_current(rho: &ScalarExpr, v: &Vec3, domain: &SamplingBox) -> Result<MassCurrent> {
    let chart = Chart::spacetime();
    let theta = |i: usize| -> Result<DifferentialForm> {
        let mut c = vec![ScalarExpr::zero(); 4];
        c[i] = ScalarExpr::one();
        c[3] = -&v[i];
        DifferentialForm::one_form(&chart, c)
    };
    let j = theta(0)?.wedge(&theta(1)?)?.wedge(&theta(2)?)?.scale(rho);
    let residual = (vector::div(&vector::scale(rho, v)) + rho.differentiate(3)).simplify();
    let check = j.d().try_add(&DifferentialForm::volume(&chart).scale(&residual))?;
    let identity_holds = form_zero(&check, domain)?;
    Ok(MassCurrent {
        j,
        residual,
        identity_holds,
    })
}

/// Electromagnetic potentials.
#[derive(Debug, Clone)]
pub struct EmSystem {
    chart: Arc<Chart>,
    a: Vec3,
    phi: ScalarExpr,
}

#[derive(Debug, Clone)]
pub struct EmReport {
    pub e: Vec3,
    pub b: Vec3,
    pub e_dot_b: ScalarExpr,
    pub process: TorsionProcess,
    /// `k = +2 E.B` (this orientation).
    pub parity_matches: bool,
    /// `k = -2 E.B`, the opposite orientation; true only when `E.B = 0`.
    pub parity_matches_opposite_orientation: bool,
    /// `Gamma = E.B`.
    pub gamma_matches: bool,
    /// `div T + dh/dt = -2 E.B` for the current and helicity.
    pub balance_holds: bool,
    /// `L(T)A = (E.B) A` through the Lie derivative directly.
    pub lie_matches: bool,
    pub df_zero: bool,
    pub genus: GenusReport,
}

impl EmSystem {
    pub fn new(a: Vec3, phi: ScalarExpr) -> Self {
        Self {
            chart: Chart::spacetime(),
            a: vector::simplify(&a),
            phi: phi.simplify(),
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn potential(&self) -> &Vec3 {
        &self.a
    }

    pub fn scalar_potential(&self) -> &ScalarExpr {
        &self.phi
    }

    pub fn action(&self) -> DifferentialForm {
        pfaff::em_action(&self.chart, self.a.clone(), self.phi.clone()).expect("four components")
    }

    /// `(E, B)` with `E = -da/dt - grad phi`, `B = curl a`.
    pub fn fields(&self) -> (Vec3, Vec3) {
        let e = vector::neg(&vector::add(&vector::dt(&self.a), &vector::grad(&self.phi)));
        (e, vector::simplify(&vector::curl(&self.a)))
    }

    pub fn diagnostics(&self, domain: &SamplingBox, cycles: &[(String, Chain)]) -> Result<EmReport> {
        let (e, b) = self.fields();
        let e_dot_b = vector::dot(&e, &b);
        let action = self.action();
        let process = thermo::torsion_process(&action, domain, cycles)?;
        let t = &process.torsion;
        let two_eb = (ScalarExpr::int(2) * &e_dot_b).simplify();
        let parity_matches = zero(&(&t.k - &two_eb), domain)?;
        let parity_matches_opposite_orientation = zero(&(&t.k + &two_eb), domain)?;
        let gamma_matches = zero(&(&t.gamma - &e_dot_b), domain)?;
        let balance = vector::div(&t.current) + t.helicity.differentiate(3) + &two_eb;
        let balance_holds = zero(&balance, domain)?;
        let lie = action.lie_derivative(&t.vector)?;
        let lie_matches = form_zero(&lie.try_sub(&action.scale(&e_dot_b))?, domain)?;
        let df_zero = action.d().d().is_syntactically_zero();
        let genus = pfaff::genus_diagnostic(&action, domain)?;
        Ok(EmReport {
            e,
            b,
            e_dot_b,
            process,
            parity_matches,
            parity_matches_opposite_orientation,
            gamma_matches,
            balance_holds,
            lie_matches,
            df_zero,
            genus,
        })
    }
}
