//! One line per acceptance criterion, at the stated tolerances.
//!
//! Every criterion is evaluated in full before the verdict, so the printed
//! table is complete even when one of them fails. Known failures are
//! listed in `KNOWN_FAILURES` with the reason; anything else failing
//! makes the target exit nonzero.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::process::Command;

use cartan::chains::{invariance_check, Chain, InvarianceMode};
use cartan::finite_topology::{is_continuous, is_continuous_via_closure, FiniteTopology, Ground, PointMap, Subset};
use cartan::forms::excess_function;
use cartan::systems::{self, mass_current, FluidSystem, Model, Scenario};
use cartan::thermo::{self, period_tolerance};
use cartan::{parse_expr, pfaff, Chart, DifferentialForm, Params, SamplingBox, ScalarExpr};
use cartan_testkit::corpus::Corpus;
use cartan_testkit::pullback::lie_by_pullback;
use cartan_testkit::topology::{all_maps, all_topologies, continuous};

/// Criteria expected to fail, with the reason. See the decisions ledger.
const KNOWN_FAILURES: &[(usize, &str)] = &[(
    5,
    "dA^dA = +2 E.B dx^dy^dz^dt for A = a.dr - phi dt; the -2 E.B form holds only with the orientation reversed",
)];

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn domain() -> SamplingBox {
    SamplingBox::cube(4, -1.0, 1.0)
}

fn zero(w: &DifferentialForm, d: &SamplingBox) -> bool {
    w.is_zero(d).unwrap().is_zero()
}

fn szero(e: &ScalarExpr, d: &SamplingBox) -> bool {
    e.is_zero(d).unwrap().is_zero()
}

fn sign(p: usize) -> ScalarExpr {
    ScalarExpr::int(if p % 2 == 0 { 1 } else { -1 })
}

fn scenario(name: &str) -> Scenario {
    systems::preset(name).unwrap()
}

fn fluid(s: &Scenario) -> &FluidSystem {
    match &s.model {
        Model::Fluid(f) => f,
        Model::Em(_) => panic!("{} is not a fluid", s.name),
    }
}

fn criterion_1() -> Outcome {
    let mut c = Corpus::spacetime(1);
    let d = domain();
    let (mut dd, mut leibniz, mut contraction) = (0, 0, 0);
    let n = 200;
    for i in 0..n {
        let p = i % 4;
        let w = c.form(p);
        if w.d().d().is_syntactically_zero() {
            dd += 1;
        }
        let q = (i / 4) % (4 - p);
        let eta = c.form(q.min(3 - p));
        let lhs = w.wedge(&eta).unwrap().d();
        let rhs = w.d().wedge(&eta).unwrap().try_add(&w.wedge(&eta.d()).unwrap().scale(&sign(p))).unwrap();
        if zero(&lhs.try_sub(&rhs).unwrap(), &d) {
            leibniz += 1;
        }
        // Contraction needs degree >= 2; lift low degrees with a 2-form.
        let target = if p >= 2 { w } else { w.wedge(&c.form(2)).unwrap() };
        let v = c.field();
        if zero(&target.interior(&v).unwrap().interior(&v).unwrap(), &d) {
            contraction += 1;
        }
    }
    Outcome::new(
        dd == n && leibniz == n && contraction == n,
        format!("dd=0 {dd}/{n}, graded Leibniz {leibniz}/{n}, i(V)i(V)=0 {contraction}/{n}"),
    )
}

fn criterion_2() -> Outcome {
    let mut c = Corpus::spacetime(2);
    let params = Params::new();
    let mut worst: f64 = 0.0;
    for pair in 0..30 {
        let w = c.form(pair % 4);
        let v = c.field();
        let lie = w.lie_derivative(&v).unwrap();
        for _ in 0..20 {
            let p = c.point(-0.8, 0.8);
            // The difference step sets the oracle's own truncation error
            // (fourth order); at 2.5e-3 it sits near 1e-7 on this corpus.
            let oracle = lie_by_pullback(&w, &v, &p, 2.5e-3, &params).unwrap();
            let exact = lie.eval(&p, &params).unwrap();
            let scale = oracle.values().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-6);
            for (idx, o) in &oracle {
                let e = exact.get(idx).copied().unwrap_or(0.0);
                worst = worst.max((e - o).abs() / scale);
            }
        }
    }
    Outcome::new(worst <= 1e-5, format!("30 pairs x 20 points, worst relative error {worst:.2e} (bound 1e-5)"))
}

fn criterion_3() -> Outcome {
    let mut c = Corpus::spacetime(3);
    let d = domain();
    let (mut unit, mut weighted) = (0, 0);
    let n = 60;
    for i in 0..n {
        let sigma = c.form(i % 3);
        let v = c.field();
        let z = sigma.d().lie_derivative(&v).unwrap();
        let dq = sigma.lie_derivative(&v).unwrap().d();
        if zero(&z.try_sub(&dq).unwrap(), &d) {
            unit += 1;
        }
        let rho = c.positive();
        let j = v.clone().with_support(rho.clone());
        let z = sigma.d().lie_derivative(&j).unwrap();
        let dq = sigma.lie_derivative(&j).unwrap().d();
        let diff = dq.try_sub(&z).unwrap();
        let ok = if sigma.degree() == 0 {
            zero(&diff, &d)
        } else {
            let ex = excess_function(&rho, &v, &sigma).unwrap();
            zero(&diff.try_add(&ex.defect).unwrap(), &d) && zero(&ex.defect, &d)
        };
        if ok {
            weighted += 1;
        }
    }
    Outcome::new(
        unit == n && weighted == n,
        format!("rho = 1: {unit}/{n} zero; nonconstant rho: {weighted}/{n} equal to the excess defect"),
    )
}

fn criterion_4() -> Outcome {
    let mut c = Corpus::spacetime(4);
    let d = domain();
    let mut ok = 0;
    let n = 100;
    for i in 0..n {
        let a = c.form(1);
        let mut j = c.field();
        if i % 2 == 1 {
            j = j.with_support(c.positive());
        }
        let law = thermo::first_law(&a, &j).unwrap();
        let u = DifferentialForm::scalar(a.chart(), law.u.clone());
        let first = zero(&law.q.try_sub(&law.w).unwrap().try_sub(&u.d()).unwrap(), &d);
        let transversal = zero(&law.w.interior(&j).unwrap(), &d);
        if first && transversal {
            ok += 1;
        }
    }
    Outcome::new(ok == n, format!("Q - W - dU = 0 and i(J)W = 0 on {ok}/{n} pairs"))
}

fn criterion_5() -> (Outcome, Vec<(String, bool)>) {
    let s = scenario("em.torsion_nonzero");
    let Model::Em(em) = &s.model else { unreachable!() };
    let d = &s.domain;
    let a = em.action();
    let t = pfaff::torsion_data(&a, d).unwrap();
    let (e, b) = em.fields();
    let eb = cartan::systems::vector::dot(&e, &b);
    let two_eb = ScalarExpr::int(2) * eb.clone();
    let q = a.d().interior(&t.vector).unwrap();
    let clauses = vec![
        ("E.B is nonzero".to_string(), !szero(&eb, d)),
        ("i(T)A = 0".to_string(), zero(&a.interior(&t.vector).unwrap(), d)),
        ("i(T)dA = Gamma A".to_string(), zero(&q.try_sub(&a.scale(&t.gamma)).unwrap(), d)),
        (
            "Q^dQ = Gamma^2 A^dA".to_string(),
            zero(
                &q.wedge(&q.d())
                    .unwrap()
                    .try_sub(&a.wedge(&a.d()).unwrap().scale(&(t.gamma.clone() * t.gamma.clone())))
                    .unwrap(),
                d,
            ),
        ),
        ("Gamma = E.B".to_string(), szero(&(t.gamma.clone() - eb.clone()), d)),
        ("parity = +2 E.B on dx^dy^dz^dt".to_string(), szero(&(t.k.clone() - two_eb.clone()), d)),
        ("parity = -2 E.B on dx^dy^dz^dt".to_string(), szero(&(t.k.clone() + two_eb), d)),
    ];
    let passed = clauses.iter().all(|(_, ok)| *ok);
    let failing: Vec<&str> = clauses.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    let detail = if failing.is_empty() {
        "all torsion identities hold".to_string()
    } else {
        format!("failing clauses: {}", failing.join("; "))
    };
    (Outcome::new(passed, detail), clauses)
}

fn invariance_line(out: &mut String, label: &str, r: &cartan::chains::InvarianceReport) -> bool {
    let ok = r.invariant;
    let _ = write!(out, "{label} {:.1e}/{:.1e} {}; ", r.derivative.abs(), r.tolerance(), if ok { "ok" } else { "DRIFT" });
    ok
}

fn criterion_6() -> Outcome {
    let mut detail = String::new();
    let mut ok = true;

    // Theorem I: flux of F through a closed surface, for any V.
    let mut corpus = Corpus::spacetime(6);
    for name in ["ns.decaying_shear", "fluid.beltrami_abc", "em.torsion_nonzero"] {
        let s = scenario(name);
        let f = s.model.action().d();
        let (_, v) = &s.processes[0];
        let r = invariance_check(&f, &s.surfaces[0].1, v, InvarianceMode::Relative).unwrap();
        ok &= invariance_line(&mut detail, &format!("I {name}"), &r);
    }
    let a = corpus.form(1);
    let sphere = Chain::sphere(corpus.chart(), [0, 1, 2], &[0.1, 0.0, -0.1, 0.2], 0.6).unwrap();
    let r = invariance_check(&a.d(), &sphere, &corpus.field(), InvarianceMode::Relative).unwrap();
    ok &= invariance_line(&mut detail, "I random", &r);

    // Theorem II on the closed flow: L(V)F = 0 and F frozen into a patch.
    let s = scenario("euler.rigid_rotation");
    let fl = fluid(&s);
    let v = &s.processes[0].1;
    let closed = thermo::classify(&fl.action(), v, &s.domain, &s.cycles).unwrap().closed_flow;
    let helmholtz = fl.helmholtz(&s.domain).unwrap();
    ok &= closed && helmholtz;
    let _ = write!(detail, "II closed={closed} L(V)F=0 {helmholtz}; ");
    let r = invariance_check(&fl.action().d(), &s.patches[0].1, v, InvarianceMode::Absolute).unwrap();
    ok &= invariance_line(&mut detail, "II disk", &r);

    // Theorem III under extremal flows: A on cycles, A^dA on a closed 3-chain.
    for name in ["euler.rigid_rotation_balanced", "fluid.beltrami_abc"] {
        let s = scenario(name);
        let a = s.model.action();
        let v = &s.processes[0].1;
        let extremal = thermo::classify(&a, v, &s.domain, &s.cycles).unwrap().extremal;
        ok &= extremal;
        for (cname, c) in &s.cycles {
            let r = invariance_check(&a, c, v, InvarianceMode::Relative).unwrap();
            ok &= invariance_line(&mut detail, &format!("III {name} {cname}"), &r);
        }
        let shell = Chain::box_cell(a.chart(), &[0, 1, 2, 3], &[-0.3, -0.4, -0.2, -0.4], &[0.8; 4])
            .unwrap()
            .boundary()
            .unwrap()
            .with_order(8)
            .with_params(s.params());
        let h = a.wedge(&a.d()).unwrap();
        let r = invariance_check(&h, &shell, v, InvarianceMode::Relative).unwrap();
        ok &= invariance_line(&mut detail, &format!("III {name} H"), &r);
    }

    // Theorem IV: periods of R vanish under the closed flow.
    let s = scenario("euler.rigid_rotation");
    let a = s.model.action();
    let sv = thermo::second_variation(&a, &s.processes[0].1, &s.domain, &s.cycles).unwrap();
    for (cname, c) in &s.cycles {
        let (p, m) = c.integrate_at(&sv.r, c.order()).unwrap();
        let pass = p.abs() <= period_tolerance(m);
        ok &= pass;
        let _ = write!(detail, "IV {cname} |R| {:.1e} {}; ", p.abs(), if pass { "ok" } else { "NONZERO" });
    }

    // Open-flow counterexample: the circulation must drift visibly.
    let s = scenario("ns.decaying_shear");
    let r = invariance_check(&s.model.action(), &s.cycles[0].1, &s.processes[0].1, InvarianceMode::Relative).unwrap();
    let ratio = r.derivative.abs() / r.tolerance();
    ok &= ratio >= 100.0 && r.transport_holds();
    let _ = write!(detail, "open-flow drift {ratio:.0}x tolerance");
    Outcome::new(ok, detail)
}

fn criterion_7() -> Outcome {
    let c = Chart::spacetime();
    let g = DifferentialForm::one_form(
        &c,
        ["y/(x^2+y^2)", "-x/(x^2+y^2)", "0", "0"].iter().map(|t| parse_expr(t, &c).unwrap()).collect(),
    )
    .unwrap();
    let once = Chain::circle(&c, (0, 1), &[0.0; 4], 1.0, 1).unwrap().integrate(&g).unwrap().value;
    let twice = Chain::circle(&c, (0, 1), &[0.0; 4], 1.0, 2).unwrap().integrate(&g).unwrap().value;
    let e1 = (once.abs() - 2.0 * PI).abs();
    let e2 = (twice - 2.0 * once).abs();
    Outcome::new(
        e1 <= 1e-8 && e2 <= 1e-8,
        format!("winding 1: {once:.12} (|.|-2pi {e1:.1e}); winding 2 minus twice winding 1: {e2:.1e}"),
    )
}

fn criterion_8() -> Outcome {
    let mut detail = String::new();
    let mut ok = true;
    let mut fluids: Vec<(String, FluidSystem, SamplingBox)> = systems::preset_names()
        .iter()
        .filter_map(|n| {
            let s = scenario(n);
            match s.model {
                Model::Fluid(f) => Some((n.to_string(), f, s.domain)),
                Model::Em(_) => None,
            }
        })
        .collect();
    let mut corpus = Corpus::spacetime(8);
    for i in 0..6 {
        let v = [corpus.expr(), corpus.expr(), corpus.expr()];
        let nu = if i % 2 == 0 { ScalarExpr::zero() } else { ScalarExpr::int(1) / ScalarExpr::int(10) };
        fluids.push((format!("random{i}"), FluidSystem::new(v, corpus.expr(), nu), domain()));
    }
    let mut identities = 0;
    for (_, f, d) in &fluids {
        let induction = f.vorticity_fields(d).is_ok();
        let balance = f.torsion_current(d).unwrap().balance_holds;
        if induction && balance {
            identities += 1;
        }
    }
    ok &= identities == fluids.len();
    let _ = write!(detail, "induction + balance {identities}/{}; ", fluids.len());

    let euler_zero = |f: &FluidSystem, d: &SamplingBox| f.euler_residual().iter().all(|c| szero(c, d));
    let extremal = |s: &Scenario| thermo::classify(&s.model.action(), &s.processes[0].1, &s.domain, &[]).unwrap().extremal;
    let pos = scenario("euler.rigid_rotation_balanced");
    let neg = scenario("euler.rigid_rotation");
    let positive = extremal(&pos) && euler_zero(fluid(&pos), &pos.domain);
    let negative = !extremal(&neg) && !euler_zero(fluid(&neg), &neg.domain);
    ok &= positive && negative;
    let _ = write!(detail, "extremal<=>Euler +{positive} -{negative}; ");

    let shear = scenario("ns.decaying_shear");
    let sf = fluid(&shear);
    let ns = sf.navier_stokes(&shear.domain).unwrap().is_solution;
    let (_, _, parity) = sf.viscous_parity(&shear.domain).unwrap();
    ok &= ns && parity;
    let _ = write!(detail, "shear NS {ns} parity {parity}; ");

    let c = Chart::spacetime();
    let e = |t: &str| parse_expr(t, &c).unwrap();
    let cases = [
        (e("1"), [e("x"), e("0"), e("0")], e("1")),
        (e("exp(-t)"), [e("x"), e("0"), e("0")], e("0")),
        (e("1 + x^2"), [e("sin(y)"), e("z"), e("t")], e("2*x*sin(y)")),
    ];
    let mut mass = 0;
    for (rho, v, expected) in &cases {
        let m = mass_current(rho, v, &domain()).unwrap();
        if m.identity_holds && szero(&(m.residual.clone() - expected.clone()), &domain()) {
            mass += 1;
        }
    }
    ok &= mass == cases.len();
    let _ = write!(detail, "mass current {mass}/{}", cases.len());
    Outcome::new(ok, detail)
}

fn bits(t: &FiniteTopology) -> Vec<u32> {
    t.opens().iter().map(|s| s.0).collect()
}

fn build(n: usize, opens: &[u32]) -> FiniteTopology {
    let g = Ground::new((0..n).map(|i| format!("p{i}"))).unwrap();
    FiniteTopology::new(g, opens.iter().map(|&b| Subset(b)).collect()).unwrap()
}

fn criterion_9() -> Outcome {
    let mut cases = 0usize;
    let mut agree = 0usize;
    for n in 1..=3 {
        for m in 1..=3 {
            let (sources, targets, maps) = (all_topologies(n), all_topologies(m), all_maps(n, m));
            for s in &sources {
                let ts = build(n, s);
                for t in &targets {
                    let tt = build(m, t);
                    for f in &maps {
                        let pm = PointMap::new(f.clone(), m).unwrap();
                        let a = is_continuous(&pm, &ts, &tt).unwrap().is_continuous();
                        let b = is_continuous_via_closure(&pm, &ts, &tt).unwrap();
                        cases += 1;
                        if a == b && a == continuous(f, s, t) {
                            agree += 1;
                        }
                    }
                }
            }
        }
    }
    let t1 = FiniteTopology::from_names(
        &["a", "b", "c", "d"],
        &[vec![], vec!["a"], vec!["a", "b"], vec!["a", "b", "c"], vec!["a", "b", "c", "d"]],
    )
    .unwrap();
    let t2 = FiniteTopology::from_names(
        &["x", "y", "z", "t"],
        &[vec![], vec!["x"], vec!["y"], vec!["x", "y"], vec!["y", "z", "t"], vec!["x", "y", "z", "t"]],
    )
    .unwrap();
    let (b1, b2) = (bits(&t1), bits(&t2));
    let mut fig_cases = 0usize;
    let mut fig_agree = 0usize;
    for f in all_maps(4, 4) {
        let pm = PointMap::new(f.clone(), 4).unwrap();
        let a = is_continuous(&pm, &t1, &t2).unwrap().is_continuous();
        let b = is_continuous_via_closure(&pm, &t1, &t2).unwrap();
        fig_cases += 1;
        if a == b && a == continuous(&f, &b1, &b2) {
            fig_agree += 1;
        }
    }
    // The two verdicts, for each admissible image of d.
    let mut verdicts = true;
    for d in ["z", "t"] {
        let f = PointMap::from_pairs(t1.ground(), t2.ground(), &[("a", "y"), ("b", "z"), ("c", "t"), ("d", d)]).unwrap();
        let forward = is_continuous(&f, &t1, &t2).unwrap().is_continuous();
        let inverse = t1.opens().iter().all(|u| t2.is_open(f.image_of(*u)));
        verdicts &= forward && !inverse;
    }
    Outcome::new(
        agree == cases && fig_agree == fig_cases && verdicts,
        format!(
            "n,m <= 3: {agree}/{cases} maps agree; four-point example: {fig_agree}/{fig_cases}; \
             forward continuous and inverse not for d -> z, t: {verdicts}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_cartan");
    let dir = tempfile::tempdir().unwrap();
    let mut identical = 0;
    let mut exit_zero = 0;
    let names = systems::preset_names();
    for name in names {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{name}.{run}.json"));
            let status = Command::new(bin)
                .args(["run", "--preset", name, "--no-summary", "--out", out.to_str().unwrap()])
                .status()
                .unwrap();
            if run == 0 && status.code() == Some(0) {
                exit_zero += 1;
            }
            outputs.push(std::fs::read(&out).unwrap_or_default());
        }
        if !outputs[0].is_empty() && outputs[0] == outputs[1] {
            identical += 1;
        }
    }
    let n = names.len();
    Outcome::new(
        identical == n && exit_zero == n,
        format!("byte-identical reports {identical}/{n}; exit 0 on the full default battery {exit_zero}/{n}"),
    )
}

fn main() {
    let (c5, clauses) = criterion_5();
    let results = vec![
        (1, "exactness of the calculus", criterion_1()),
        (2, "Lie derivative vs flow pullback", criterion_2()),
        (3, "continuity of d through L(V)", criterion_3()),
        (4, "first law", criterion_4()),
        (5, "torsion identities", c5),
        (6, "theorem checks on chains", criterion_6()),
        (7, "period integrals", criterion_7()),
        (8, "fluid identities", criterion_8()),
        (9, "finite topology", criterion_9()),
        (10, "CLI determinism", criterion_10()),
    ];
    for (n, title, o) in &results {
        println!("criterion {n:>2} {}: {title}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if let Some((_, why)) = KNOWN_FAILURES.iter().find(|(k, _)| k == n) {
            if !o.passed {
                println!("             known failure: {why}");
            }
        }
    }
    for (name, ok) in &clauses {
        println!("  criterion 5 clause {}: {name}", if *ok { "PASS" } else { "FAIL" });
    }

    // Only the sign clause of criterion 5 may fail.
    let mut unexpected = Vec::new();
    for (name, ok) in &clauses {
        if !ok && name != "parity = -2 E.B on dx^dy^dz^dt" {
            unexpected.push(format!("criterion 5 clause: {name}"));
        }
    }
    for (n, _, o) in &results {
        if !o.passed && !KNOWN_FAILURES.iter().any(|(k, _)| k == n) {
            unexpected.push(format!("criterion {n}: {}", o.detail));
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures:\n  {}", unexpected.join("\n  "));
        std::process::exit(1);
    }
}
