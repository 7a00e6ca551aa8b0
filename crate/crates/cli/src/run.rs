//! Turn a configuration into kernel objects and run the batteries.

use std::collections::BTreeMap;
use std::sync::Arc;

use cartan::chains::{invariance_check, period_spectrum, Cell, Chain, InvarianceMode, TRANSPORT_TOL};
use cartan::finite_topology::{is_continuous, is_continuous_via_closure, Continuity, FiniteTopology, PointMap};
use cartan::systems::{self, EmSystem, FluidSystem, Model};
use cartan::thermo::{self, Category};
use cartan::{parse_expr, pfaff, Chart, DifferentialForm, Params, SamplingBox, ScalarExpr, VectorField, ZeroTest};
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::{Battery, ChainShape, ChainSpec, RunConfig, SystemSpec};
use crate::report::{measured, BatteryReport, Check, Provenance, Report, SystemInfo, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("internal: {0}")]
    Internal(#[from] cartan::Error),
}

/// Everything the batteries need, built once.
pub struct Setup {
    pub chart: Arc<Chart>,
    pub params: Params,
    pub domain: SamplingBox,
    pub kind: String,
    pub preset: Option<String>,
    pub description: Option<String>,
    pub model: Option<Model>,
    pub action: Option<DifferentialForm>,
    pub processes: Vec<(String, VectorField)>,
    /// Closed 1-chains.
    pub cycles: Vec<(String, Chain)>,
    /// Closed 2-chains.
    pub surfaces: Vec<(String, Chain)>,
    /// Everything else.
    pub patches: Vec<(String, Chain)>,
}

fn expr(text: &str, chart: &Chart) -> Result<ScalarExpr, RunError> {
    parse_expr(text, chart).map_err(|e| RunError::Config(format!("`{text}`: {e}")))
}

fn exprs(texts: &[String], chart: &Chart) -> Result<Vec<ScalarExpr>, RunError> {
    texts.iter().map(|t| expr(t, chart)).collect()
}

fn three(v: Vec<ScalarExpr>) -> [ScalarExpr; 3] {
    v.try_into().expect("validated length")
}

fn build_chain(spec: &ChainSpec, chart: &Arc<Chart>, params: &Params) -> Result<Chain, RunError> {
    let axis = |n: &String| chart.index_of(n).ok_or_else(|| RunError::Config(format!("unknown axis `{n}`")));
    let chain = match &spec.shape {
        ChainShape::Cells { degree, cells, closed } => {
            let cube = Chart::cube(*degree);
            let mut built = Vec::new();
            for c in cells {
                built.push(Cell::new(exprs(&c.components, &cube)?, c.orientation)?);
            }
            Chain::new(chart, *degree, built)?.closed(*closed)
        }
        ChainShape::Circle {
            axes,
            center,
            radius,
            windings,
        } => Chain::circle(chart, (axis(&axes[0])?, axis(&axes[1])?), center, *radius, *windings as i64)?,
        ChainShape::Disk { axes, center, radius } => {
            Chain::disk(chart, (axis(&axes[0])?, axis(&axes[1])?), center, *radius)?
        }
        ChainShape::Sphere { axes, center, radius } => {
            Chain::sphere(chart, [axis(&axes[0])?, axis(&axes[1])?, axis(&axes[2])?], center, *radius)?
        }
        ChainShape::Box { axes, origin, sides } => {
            let a = axes.iter().map(axis).collect::<Result<Vec<_>, _>>()?;
            Chain::box_cell(chart, &a, origin, sides)?
        }
    };
    let chain = chain.with_params(params.clone());
    Ok(match spec.order {
        Some(o) => chain.with_order(o),
        None => chain,
    })
}

pub fn setup(cfg: &RunConfig) -> Result<Setup, RunError> {
    let chart = Chart::new(cfg.chart.iter().cloned()).map_err(|e| RunError::Config(e.to_string()))?;
    let mut params: Params = BTreeMap::new();
    let mut preset = None;
    let mut description = None;
    let mut model = None;
    let mut processes = Vec::new();
    let mut cycles = Vec::new();
    let mut surfaces = Vec::new();
    let mut patches = Vec::new();
    let mut kind = "none".to_string();

    match &cfg.system {
        Some(SystemSpec::Preset(name)) => {
            if !cfg.is_spacetime() {
                return Err(RunError::Config(format!("preset `{name}` needs the chart x, y, z, t")));
            }
            let s = systems::preset(name).map_err(|e| RunError::Config(e.to_string()))?;
            params.extend(s.params());
            preset = Some(s.name.to_string());
            description = Some(s.description.to_string());
            kind = match s.model {
                Model::Fluid(_) => "fluid".into(),
                Model::Em(_) => "electromagnetic".into(),
            };
            model = Some(s.model);
            processes = s.processes;
            cycles = s.cycles;
            surfaces = s.surfaces;
            patches = s.patches;
        }
        Some(SystemSpec::Action(_)) => kind = "action".into(),
        Some(SystemSpec::Fluid {
            velocity,
            pressure,
            viscosity,
        }) => {
            kind = "fluid".into();
            let f = FluidSystem::new(three(exprs(velocity, &chart)?), expr(pressure, &chart)?, expr(viscosity, &chart)?);
            processes.push(("flow".to_string(), f.flow_field()));
            model = Some(Model::Fluid(f));
        }
        Some(SystemSpec::Em { potential, phi }) => {
            kind = "electromagnetic".into();
            model = Some(Model::Em(EmSystem::new(three(exprs(potential, &chart)?), expr(phi, &chart)?)));
        }
        None => {}
    }
    params.extend(cfg.params.iter().cloned());

    let (lo, hi) = cfg.run.bounds;
    let domain = SamplingBox::cube(chart.dim(), lo, hi)
        .with_params(params.clone())
        .with_test(ZeroTest {
            samples: cfg.run.samples,
            eps: cfg.run.tolerance,
            seed: cfg.run.seed,
        });

    let action = match (&cfg.system, &model) {
        (Some(SystemSpec::Action(c)), _) => Some(DifferentialForm::one_form(&chart, exprs(c, &chart)?)?),
        (_, Some(m)) => Some(m.action()),
        _ => None,
    };
    // Electromagnetic systems defined in the file get the torsion process.
    if let (Some(Model::Em(e)), true) = (&model, processes.is_empty()) {
        if !e.action().wedge(&e.action().d())?.is_zero(&domain)?.is_zero() {
            processes.push(("torsion".into(), pfaff::torsion_data(&e.action(), &domain)?.vector));
        }
    }
    for p in &cfg.processes {
        let mut v = VectorField::new(&chart, exprs(&p.field, &chart)?)?;
        if let Some(s) = &p.support {
            v = v.with_support(expr(s, &chart)?);
        }
        processes.push((p.name.clone(), v));
    }

    // Preset chains pick up overridden parameters.
    let rebind = |list: Vec<(String, Chain)>| -> Vec<(String, Chain)> {
        list.into_iter().map(|(n, c)| (n, c.with_params(params.clone()))).collect()
    };
    cycles = rebind(cycles);
    surfaces = rebind(surfaces);
    patches = rebind(patches);
    for spec in &cfg.chains {
        let c = build_chain(spec, &chart, &params)?;
        let entry = (spec.name.clone(), c);
        match (entry.1.is_closed(), entry.1.degree()) {
            (true, 1) => cycles.push(entry),
            (true, 2) => surfaces.push(entry),
            _ => patches.push(entry),
        }
    }
    Ok(Setup {
        chart,
        params,
        domain,
        kind,
        preset,
        description,
        model,
        action,
        processes,
        cycles,
        surfaces,
        patches,
    })
}

fn zero(w: &DifferentialForm, d: &SamplingBox) -> cartan::Result<bool> {
    Ok(w.is_zero(d)?.is_zero())
}

fn szero(e: &ScalarExpr, d: &SamplingBox) -> cartan::Result<bool> {
    Ok(e.is_zero(d)?.is_zero())
}

fn show(e: &ScalarExpr, chart: &Chart) -> String {
    e.display(chart).to_string()
}

fn show3(v: &[ScalarExpr], chart: &Chart) -> Value {
    Value::from(v.iter().map(|e| show(e, chart)).collect::<Vec<_>>())
}

/// Run one battery body, turning a kernel error into an error status.
fn guarded(name: &str, body: impl FnOnce(&mut BatteryReport) -> cartan::Result<()>) -> BatteryReport {
    let mut r = BatteryReport::new(name);
    if let Err(e) = body(&mut r) {
        r.error = Some(e.to_string());
    }
    r.finish()
}

fn pfaff_battery(s: &Setup) -> BatteryReport {
    let Some(a) = &s.action else {
        return BatteryReport::skipped("pfaff", "no action 1-form");
    };
    let tol = s.domain.test.eps;
    guarded("pfaff", |r| {
        let seq = pfaff::pfaff_sequence(a, &s.domain)?;
        let labels = ["A", "dA", "A^dA", "dA^dA", "A^dA^dA", "dA^dA^dA"];
        let elements: Vec<Value> = seq
            .elements
            .iter()
            .zip(&seq.nonzero)
            .enumerate()
            .map(|(i, (e, nz))| json!({ "name": labels.get(i).copied().unwrap_or("?"), "form": e.to_string(), "nonzero": nz }))
            .collect();
        r.put("action", a.to_string());
        r.put("elements", elements);
        r.put("pfaff_dimension", seq.dimension);
        let centre = seq.pointwise_dimension(&s.domain.center(), &s.params, 1e-12)?;
        r.put("pointwise_dimension_at_center", centre);
        r.put("frobenius_integrable", pfaff::frobenius_integrable(a, &s.domain)?);
        let base = pfaff::topological_base(a, &s.domain)?;
        r.put(
            "topological_base",
            base.elements.iter().map(|b| b.label.clone()).collect::<Vec<_>>(),
        );
        r.put("disconnected", base.disconnected);
        r.check(Check::symbolic("ddA = 0", a.d().d().is_syntactically_zero(), tol));
        if a.chart().dim() >= 3 {
            let h = a.wedge(&a.d())?;
            let k = a.d().wedge(&a.d())?;
            r.check(Check::symbolic("d(A^dA) = dA^dA", zero(&h.d().try_sub(&k)?, &s.domain)?, tol));
        }
        if a.chart().dim() == 4 {
            let g = pfaff::genus_diagnostic(a, &s.domain)?;
            r.put("genus", g.genus);
            r.put("torsion_current_zero", g.torsion_current_zero);
        }
        Ok(())
    })
}

fn torsion_battery(s: &Setup) -> BatteryReport {
    let Some(a) = &s.action else {
        return BatteryReport::skipped("torsion", "no action 1-form");
    };
    if a.chart().dim() != 4 {
        return BatteryReport::skipped("torsion", "torsion vector needs a 4-dimensional chart");
    }
    let tol = s.domain.test.eps;
    let h = match a.wedge(&a.d()).and_then(|h| Ok((zero(&h, &s.domain)?, h))) {
        Ok((true, _)) => return BatteryReport::skipped("torsion", "A^dA vanishes: no torsion vector"),
        Ok((false, h)) => h,
        Err(e) => {
            let mut r = BatteryReport::new("torsion");
            r.error = Some(e.to_string());
            return r.finish();
        }
    };
    guarded("torsion", |r| {
        let tp = thermo::torsion_process(a, &s.domain, &s.cycles)?;
        let t = &tp.torsion;
        let chart = a.chart();
        r.put("torsion", h.to_string());
        r.put("torsion_vector", show3(t.vector.components(), chart));
        r.put("gamma", show(&t.gamma, chart));
        r.put("parity_coefficient", show(&t.k, chart));
        r.put("current", show3(&t.current, chart));
        r.put("helicity", show(&t.helicity, chart));
        if let Some((mean, dev)) = t.parity_ratio(&s.domain)? {
            r.put("parity_over_gamma", measured(mean, 1e-9 * mean.abs().max(1.0), dev <= 1e-9 * mean.abs().max(1.0)));
        }
        r.put("irreversible", tp.report.irreversible());
        r.put("category", tp.report.category.name());
        r.check(Check::symbolic("i(T)A = 0", zero(&a.interior(&t.vector)?, &s.domain)?, tol));
        let itda = a.d().interior(&t.vector)?;
        r.check(Check::symbolic("i(T)dA = Gamma A", zero(&itda.try_sub(&a.scale(&t.gamma))?, &s.domain)?, tol));
        r.check(Check::symbolic("d(A^dA) = K", zero(&h.d().try_sub(&t.parity)?, &s.domain)?, tol));
        r.check(Check::symbolic("Q = Gamma A", tp.heat_is_gamma_a, tol));
        r.check(Check::symbolic("Q^dQ = Gamma^2 A^dA", tp.q_dq_matches, tol));
        Ok(())
    })
}

fn thermo_battery(s: &Setup) -> BatteryReport {
    let Some(a) = &s.action else {
        return BatteryReport::skipped("thermo", "no action 1-form");
    };
    if s.processes.is_empty() {
        return BatteryReport::skipped("thermo", "no process declared");
    }
    let tol = s.domain.test.eps;
    guarded("thermo", |r| {
        let mut procs = Vec::new();
        for (name, j) in &s.processes {
            let rep = thermo::classify(a, j, &s.domain, &s.cycles)?;
            let law = &rep.law;
            let u = DifferentialForm::scalar(a.chart(), law.u.clone());
            let residual = law.q.try_sub(&law.w)?.try_sub(&u.d())?;
            r.check(Check::symbolic(format!("{name}: Q = W + dU"), zero(&residual, &s.domain)?, tol));
            r.check(Check::symbolic(format!("{name}: i(J)W = 0"), zero(&law.w.interior(j)?, &s.domain)?, tol));
            let mut entry = json!({
                "process": name,
                "field": j.to_string(),
                "Q": law.q.to_string(),
                "W": law.w.to_string(),
                "U": show(&law.u, a.chart()),
                "category": rep.category.name(),
                "adiabatic": rep.adiabatic,
                "closed_flow": rep.closed_flow,
                "reversible": rep.reversible,
                "irreversible": rep.irreversible(),
                "extremal": rep.extremal,
                "associated": rep.associated,
                "characteristic": rep.characteristic,
                "radiative": rep.radiative,
                "q_pfaff_dimension": rep.q_pfaff_dimension,
                "work_periods": periods_json(&law.w, &s.cycles)?,
            });
            let sv = thermo::second_variation(a, j, &s.domain, &s.cycles)?;
            entry["second_variation"] = json!({
                "R": sv.r.to_string(),
                "dR_zero": sv.dr_zero,
                "periods": periods_json(&sv.r, &s.cycles)?,
                "periods_vanish": sv.periods_vanish,
                "QF_exact": sv.q_f_exact,
            });
            if sv.dq_zero {
                r.check(Check::symbolic(format!("{name}: closed flow gives dR = 0"), sv.dr_zero, tol));
                r.check(Check::symbolic(format!("{name}: closed flow gives L(J)(Q^F) exact"), sv.q_f_exact, tol));
                if rep.w_closed_is_conserved(j, &s.domain)? {
                    r.check(Check::symbolic(format!("{name}: closed flow conserves W"), true, tol));
                }
            }
            procs.push(entry);
        }
        r.put("processes", procs);
        Ok(())
    })
}

/// Small extension used by the thermo battery: `L(J)W = 0` whenever `dW = 0`.
trait Conserved {
    fn w_closed_is_conserved(&self, j: &VectorField, d: &SamplingBox) -> cartan::Result<bool>;
}

impl Conserved for thermo::ProcessReport {
    fn w_closed_is_conserved(&self, j: &VectorField, d: &SamplingBox) -> cartan::Result<bool> {
        if !zero(&self.law.w.d(), d)? {
            return Ok(false);
        }
        zero(&self.law.w.lie_derivative(j)?, d)
    }
}

/// Periods of `w` with the threshold under which they count as zero.
fn periods_json(w: &DifferentialForm, cycles: &[(String, Chain)]) -> cartan::Result<Value> {
    let mut out = Vec::new();
    for (name, c) in cycles {
        let (p, m) = c.integrate_at(w, c.order())?;
        let tol = thermo::period_tolerance(m);
        out.push(json!({ "cycle": name, "period": measured(p, tol, p.abs() <= tol) }));
    }
    Ok(out.into())
}

fn invariance_entry(name: &str, rep: &cartan::chains::InvarianceReport) -> Value {
    json!({
        "chain": name,
        "derivative": measured(rep.derivative, rep.tolerance(), rep.invariant),
        "lie_integral": rep.lie_integral,
        "scale": rep.scale,
        "invariant": rep.invariant,
        "transport_error": measured(rep.transport_error, TRANSPORT_TOL, rep.transport_holds()),
    })
}

fn invariant_check(label: String, rep: &cartan::chains::InvarianceReport) -> Check {
    Check::at_most(label, rep.derivative.abs(), rep.tolerance())
}

/// Boundary of a 4-box around the sampling centre: a closed 3-chain.
fn closed_three_chain(s: &Setup) -> cartan::Result<Chain> {
    let c = s.domain.center();
    let origin: Vec<f64> = c.iter().map(|x| x - 0.4).collect();
    Ok(Chain::box_cell(&s.chart, &[0, 1, 2, 3], &origin, &[0.8; 4])?
        .boundary()?
        .with_order(8)
        .with_params(s.params.clone()))
}

fn theorems_battery(s: &Setup) -> BatteryReport {
    let Some(a) = &s.action else {
        return BatteryReport::skipped("theorems", "no action 1-form");
    };
    if s.processes.is_empty() {
        return BatteryReport::skipped("theorems", "no process declared");
    }
    let tol = s.domain.test.eps;
    guarded("theorems", |r| {
        let f = a.d();
        let mut entries = Vec::new();
        for (name, v) in &s.processes {
            let rep = thermo::classify(a, v, &s.domain, &s.cycles)?;
            let mut e = json!({ "process": name, "category": rep.category.name() });

            // Theorem I: flux of F through closed surfaces, any process.
            let mut t1 = Vec::new();
            for (cname, c) in &s.surfaces {
                let ir = invariance_check(&f, c, v, InvarianceMode::Relative)?;
                r.check(invariant_check(format!("{name}: theorem I, F over {cname}"), &ir));
                t1.push(invariance_entry(cname, &ir));
            }
            e["theorem_1"] = t1.into();

            // Theorem II: closed flows freeze F in.
            if rep.closed_flow {
                let lie_f = f.lie_derivative(v)?;
                r.check(Check::symbolic(format!("{name}: theorem II, L(V)F = 0"), zero(&lie_f, &s.domain)?, tol));
                let mut t2 = Vec::new();
                for (cname, c) in s.patches.iter().filter(|(_, c)| c.degree() == 2) {
                    let ir = invariance_check(&f, c, v, InvarianceMode::Absolute)?;
                    r.check(invariant_check(format!("{name}: theorem II, F over {cname}"), &ir));
                    t2.push(invariance_entry(cname, &ir));
                }
                e["theorem_2"] = t2.into();
            }

            // Theorem III: A and A^dA are relative invariants when W is exact.
            let conservative = matches!(rep.category, Category::Hamiltonian | Category::EulerBernoulli);
            let mut t3 = Vec::new();
            for (cname, c) in &s.cycles {
                let ir = invariance_check(a, c, v, InvarianceMode::Relative)?;
                if conservative {
                    r.check(invariant_check(format!("{name}: theorem III, A over {cname}"), &ir));
                } else {
                    r.check(
                        Check::at_most(format!("{name}: drift of A over {cname} matches L(V)A"), ir.transport_error, TRANSPORT_TOL)
                            .with_detail("process is not conservative; the drift is reported, not required to vanish"),
                    );
                }
                t3.push(invariance_entry(cname, &ir));
            }
            if conservative && s.chart.dim() == 4 {
                let h = a.wedge(&f)?;
                let shell = closed_three_chain(s)?;
                let ir = invariance_check(&h, &shell, v, InvarianceMode::Relative)?;
                r.check(invariant_check(format!("{name}: theorem III, A^dA over a closed 3-chain"), &ir));
                t3.push(invariance_entry("box_boundary", &ir));
            }
            e["theorem_3"] = t3.into();

            // Theorem IV: closed flows make Q a relative invariant.
            if rep.closed_flow && !s.cycles.is_empty() {
                let sv = thermo::second_variation(a, v, &s.domain, &s.cycles)?;
                for (cname, c) in &s.cycles {
                    let (p, m) = c.integrate_at(&sv.r, c.order())?;
                    r.check(Check::at_most(
                        format!("{name}: theorem IV, period of R over {cname}"),
                        p.abs(),
                        thermo::period_tolerance(m),
                    ));
                }
                e["theorem_4"] = periods_json(&sv.r, &s.cycles)?;
            }
            entries.push(e);
        }
        r.put("processes", entries);
        Ok(())
    })
}

fn periods_battery(s: &Setup) -> BatteryReport {
    let Some(a) = &s.action else {
        return BatteryReport::skipped("periods", "no action 1-form");
    };
    if s.cycles.is_empty() && s.surfaces.is_empty() {
        return BatteryReport::skipped("periods", "no closed chains declared");
    }
    guarded("periods", |r| {
        let cycles: Vec<Chain> = s.cycles.iter().map(|(_, c)| c.clone()).collect();
        let names: Vec<&String> = s.cycles.iter().map(|(n, _)| n).collect();
        let mut forms: Vec<(String, DifferentialForm)> = vec![("A".into(), a.clone())];
        for (name, j) in &s.processes {
            let law = thermo::first_law(a, j)?;
            forms.push((format!("W[{name}]"), law.w));
            forms.push((format!("Q[{name}]"), law.q));
        }
        let mut spectra = Vec::new();
        for (label, w) in &forms {
            if cycles.is_empty() || !zero(&w.d(), &s.domain)? {
                continue;
            }
            let sp = period_spectrum(w, &cycles, &s.domain)?;
            spectra.push(json!({
                "form": label,
                "cycles": names,
                "periods": sp.periods,
                "unit": sp.unit,
                "ratios": sp.ratios,
                "integer_ratios": measured(sp.max_deviation, 1e-6, sp.max_deviation <= 1e-6),
            }));
        }
        r.put("closed_one_forms", spectra);
        // dA is exact: its flux through every closed surface vanishes.
        let f = a.d();
        let mut fluxes = Vec::new();
        for (cname, c) in &s.surfaces {
            let i = c.integrate(&f)?;
            let tol = thermo::period_tolerance(i.magnitude) + i.error;
            r.check(Check::at_most(format!("flux of dA through {cname}"), i.value.abs(), tol));
            fluxes.push(json!({
                "chain": cname,
                "flux": measured(i.value, tol, i.value.abs() <= tol),
                "quadrature_error": i.error,
                "magnitude": i.magnitude,
            }));
        }
        r.put("fluxes", fluxes);
        Ok(())
    })
}

fn fluid_battery(s: &Setup) -> BatteryReport {
    let Some(Model::Fluid(fl)) = &s.model else {
        return BatteryReport::skipped("fluid", "not a fluid system");
    };
    let tol = s.domain.test.eps;
    let d = &s.domain;
    guarded("fluid", |r| {
        let chart = fl.chart();
        let vf = fl.vorticity_fields(d);
        r.check(Check::symbolic("F = dA, curl a + dw/dt = 0, div w = 0", vf.is_ok(), tol));
        if let Ok(vf) = &vf {
            r.put("vorticity", show3(&vf.omega, chart));
            r.put("acceleration", show3(&vf.accel, chart));
        }
        let tc = fl.torsion_current(d)?;
        r.put("torsion_current", show3(&tc.current, chart));
        r.put("helicity", show(&tc.helicity, chart));
        r.put("anomaly", show(&tc.anomaly, chart));
        r.check(Check::symbolic("div T + dh/dt = -2 a.w", tc.balance_holds, tol));
        r.check(Check::symbolic("T = a x v + H w matches the torsion vector", tc.matches_torsion_vector, tol));

        let euler = fl.euler_residual();
        let euler_zero = euler.iter().map(|c| szero(c, d)).collect::<cartan::Result<Vec<_>>>()?.iter().all(|b| *b);
        let extremal = thermo::classify(&fl.action(), &fl.flow_field(), d, &[])?.extremal;
        r.put("euler_residual", show3(&euler, chart));
        r.put("euler_solution", euler_zero);
        r.check(Check::verdict("extremal iff Euler residual vanishes", extremal == euler_zero));

        let ns = fl.navier_stokes(d)?;
        r.put("navier_stokes_residual", show3(&ns.residual, chart));
        r.put("navier_stokes_solution", ns.is_solution);
        r.put("viscous_work", ns.work.to_string());
        if ns.is_solution {
            r.check(Check::symbolic("W = -nu curl w.(dr - v dt)", ns.work_matches_first_law, tol));
            let (k, viscous, agree) = fl.viscous_parity(d)?;
            r.check(Check::symbolic("parity coefficient = 2 nu w.curl w", agree, tol));
            r.put("parity_coefficient", show(&k, chart));
            r.put("parity_minus_two_nu_convention", szero(&(&k + &viscous), d)?);
            let eng = fl.ns_engineering_torsion(d)?;
            r.check(Check::symbolic("h v - L curl v - nu v x curl curl v = T", eng.agrees, tol));
        }
        let rho = ScalarExpr::one();
        let mc = systems::mass_current(&rho, fl.velocity(), d)?;
        r.check(Check::symbolic("dJ = -(div(rho v) + d(rho)/dt) Omega", mc.identity_holds, tol));
        r.put("mass_residual", show(&mc.residual, chart));
        let (_, same) = fl.torsion_mass_comparison(&rho, d)?;
        r.put("i(V)dH_equals_mass_current", same);
        let (pres, identity) = fl.parity_continuity(d)?;
        r.check(Check::symbolic("div(k v) + dk/dt is the coefficient of L(V)K", identity, tol));
        r.put("parity_continuity_residual", show(&pres, chart));
        r.put("helmholtz", fl.helmholtz(d)?);
        Ok(())
    })
}

fn em_battery(s: &Setup) -> BatteryReport {
    let Some(Model::Em(em)) = &s.model else {
        return BatteryReport::skipped("em", "not an electromagnetic system");
    };
    let tol = s.domain.test.eps;
    let d = &s.domain;
    if em.action().wedge(&em.action().d()).and_then(|h| zero(&h, d)).unwrap_or(false) {
        return guarded("em", |r| {
            let (e, b) = em.fields();
            r.put("E", show3(&e, em.chart()));
            r.put("B", show3(&b, em.chart()));
            r.note = Some("A^dA vanishes: torsion diagnostics not applicable".into());
            r.check(Check::symbolic("dF = 0", em.action().d().d().is_syntactically_zero(), tol));
            Ok(())
        });
    }
    guarded("em", |r| {
        let rep = em.diagnostics(d, &s.cycles)?;
        let chart = em.chart();
        r.put("E", show3(&rep.e, chart));
        r.put("B", show3(&rep.b, chart));
        r.put("E.B", show(&rep.e_dot_b, chart));
        r.put("parity_coefficient", show(&rep.process.torsion.k, chart));
        r.put("parity_minus_two_EB_convention", rep.parity_matches_opposite_orientation);
        r.put("genus", rep.genus.genus);
        r.put("irreversible", rep.process.report.irreversible());
        r.put("category", rep.process.report.category.name());
        r.check(Check::symbolic("K = 2 E.B dx^dy^dz^dt", rep.parity_matches, tol));
        r.check(Check::symbolic("Gamma = E.B", rep.gamma_matches, tol));
        r.check(Check::symbolic("div T + dh/dt = -2 E.B", rep.balance_holds, tol));
        r.check(Check::symbolic("L(T)A = (E.B) A", rep.lie_matches, tol));
        r.check(Check::symbolic("dF = 0", rep.df_zero, tol));
        Ok(())
    })
}

fn topology_battery(cfg: &RunConfig) -> BatteryReport {
    if cfg.maps.is_empty() {
        return BatteryReport::skipped("topology", "no maps declared");
    }
    guarded("topology", |r| {
        let mut built = BTreeMap::new();
        for t in &cfg.topologies {
            built.insert(t.name.clone(), FiniteTopology::from_names(&t.points, &t.opens)?);
        }
        let mut entries = Vec::new();
        for m in &cfg.maps {
            let (t1, t2) = (&built[&m.from], &built[&m.to]);
            let f = PointMap::from_pairs(t1.ground(), t2.ground(), &m.pairs)?;
            let by_preimage = is_continuous(&f, t1, t2)?;
            let by_closure = is_continuous_via_closure(&f, t1, t2)?;
            r.check(Check::verdict(
                format!("{}: preimage and closure definitions agree", m.name),
                by_preimage.is_continuous() == by_closure,
            ));
            let witness = match &by_preimage {
                Continuity::Continuous => Value::Null,
                Continuity::Discontinuous { open_set, preimage } => json!({
                    "open_set": t2.ground().names(*open_set),
                    "preimage": t1.ground().names(*preimage),
                }),
            };
            // The inverse-image mapping sends an open set U of the source to f(U).
            let failing = t1.opens().iter().copied().find(|u| !t2.is_open(f.image_of(*u)));
            let inverse_continuous = failing.is_none();
            let inverse_witness = failing.map_or(Value::Null, |u| {
                json!({ "open_set": t1.ground().names(u), "preimage": t2.ground().names(f.image_of(u)) })
            });
            if let Some(e) = m.expect {
                r.check(Check::verdict(format!("{}: continuity as expected", m.name), by_preimage.is_continuous() == e));
            }
            if let Some(e) = m.expect_inverse {
                r.check(Check::verdict(format!("{}: inverse continuity as expected", m.name), inverse_continuous == e));
            }
            entries.push(json!({
                "map": m.name,
                "continuous": by_preimage.is_continuous(),
                "witness": witness,
                "inverse_continuous": inverse_continuous,
                "inverse_witness": inverse_witness,
                "homeomorphism": by_preimage.is_continuous() && inverse_continuous && f.is_bijective(),
            }));
        }
        r.put("maps", entries);
        Ok(())
    })
}

/// Run the selected batteries. Configuration problems are errors; kernel
/// failures inside a battery are recorded in the report.
pub fn run(cfg: &RunConfig) -> Result<Report, RunError> {
    let s = setup(cfg)?;
    let mut batteries = Vec::new();
    for b in &cfg.run.batteries {
        batteries.push(match b {
            Battery::Pfaff => pfaff_battery(&s),
            Battery::Torsion => torsion_battery(&s),
            Battery::Thermo => thermo_battery(&s),
            Battery::Theorems => theorems_battery(&s),
            Battery::Periods => periods_battery(&s),
            Battery::Fluid => fluid_battery(&s),
            Battery::Em => em_battery(&s),
            Battery::Topology => topology_battery(cfg),
        });
    }
    let totals = Report::tally(&batteries);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        provenance: Provenance {
            tool: "cartan".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            seed: cfg.run.seed,
            tolerance: cfg.run.tolerance,
            samples: cfg.run.samples,
            bounds: [cfg.run.bounds.0, cfg.run.bounds.1],
            batteries: cfg.run.batteries.iter().map(|b| b.name().to_string()).collect(),
        },
        system: SystemInfo {
            kind: s.kind.clone(),
            preset: s.preset.clone(),
            description: s.description.clone(),
            chart: cfg.chart.clone(),
            params: s.params.clone(),
            action: s.action.as_ref().map(|a| a.to_string()),
            processes: s.processes.iter().map(|(n, _)| n.clone()).collect(),
            chains: s
                .cycles
                .iter()
                .chain(&s.surfaces)
                .chain(&s.patches)
                .map(|(n, _)| n.clone())
                .collect(),
        },
        batteries,
        totals,
    })
}
