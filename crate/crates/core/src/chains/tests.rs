use std::f64::consts::PI;

use super::*;
use crate::expr::{parse_expr, Exclusion};

fn st(text: &str) -> ScalarExpr {
    parse_expr(text, &Chart::spacetime()).unwrap()
}

fn one_form(comps: &[&str]) -> DifferentialForm {
    let c = Chart::spacetime();
    DifferentialForm::one_form(&c, comps.iter().map(|s| st(s)).collect()).unwrap()
}

fn field(comps: &[&str]) -> VectorField {
    VectorField::new(&Chart::spacetime(), comps.iter().map(|s| st(s)).collect()).unwrap()
}

fn gamma() -> DifferentialForm {
    one_form(&["y/(x^2 + y^2)", "-x/(x^2 + y^2)", "0", "0"])
}

const ORIGIN: [f64; 4] = [0.0; 4];

#[test]
fn harmonic_period_is_minus_two_pi_counterclockwise() {
    let c = Chart::spacetime();
    let circle = Chain::circle(&c, (0, 1), &ORIGIN, 1.0, 1).unwrap();
    let i = circle.integrate(&gamma()).unwrap();
    assert!((i.value + 2.0 * PI).abs() < 1e-8, "{}", i.value);
    assert!(i.error < 1e-10);

    let twice = Chain::circle(&c, (0, 1), &ORIGIN, 1.0, 2).unwrap();
    let v2 = twice.integrate(&gamma()).unwrap().value;
    assert!((v2 - 2.0 * i.value).abs() < 1e-8);
}

#[test]
fn period_ratios_are_integers() {
    let c = Chart::spacetime();
    let cycles: Vec<Chain> = (1..=3)
        .map(|k| Chain::circle(&c, (0, 1), &[0.2, -0.1, 0.5, 1.0], 1.5, k).unwrap())
        .collect();
    let domain = SamplingBox::cube(4, -2.0, 2.0).excluding(Exclusion::around_axis(vec![0, 1], 0.1));
    let s = period_spectrum(&gamma(), &cycles, &domain).unwrap();
    assert_eq!(s.ratios.iter().map(|r| r.round() as i64).collect::<Vec<_>>(), [-1, -2, -3]);
    assert!(s.max_deviation < 1e-8);

    // Two-function format with phi = x, chi = y: same family, opposite sense.
    let two = one_form(&["-y/(x^2 + y^2)", "x/(x^2 + y^2)", "0", "0"]);
    let t = period_spectrum(&two, &cycles, &domain).unwrap();
    for (a, b) in s.periods.iter().zip(&t.periods) {
        assert!((a + b).abs() < 1e-8);
    }

    let exact = one_form(&["2*x*y", "x^2", "0", "0"]);
    let e = period_spectrum(&exact, &cycles, &domain).unwrap();
    assert!(e.unit.is_none() && e.periods.iter().all(|p| *p == 0.0));

    let not_closed = one_form(&["0", "x", "0", "0"]);
    assert!(matches!(period_spectrum(&not_closed, &cycles, &domain), Err(Error::Usage(_))));
}

#[test]
fn exact_forms_vanish_on_cycles() {
    let c = Chart::spacetime();
    let circle = Chain::circle(&c, (0, 2), &[0.3, 0.1, 0.0, 2.0], 0.7, 1).unwrap();
    let dx = DifferentialForm::differential(&c, 0).unwrap();
    assert!(circle.integrate(&dx).unwrap().value.abs() < 1e-14);
    assert!(circle.closedness_residual(7).unwrap() < 1e-12);
    let sphere = Chain::sphere(&c, [0, 1, 2], &[0.0, 0.0, 0.0, 1.0], 1.2).unwrap();
    assert!(sphere.closedness_residual(7).unwrap() < 1e-10);
}

#[test]
fn open_arc_fails_the_closedness_check() {
    let c = Chart::spacetime();
    let arc = Chain::box_cell(&c, &[0], &[0.0, 0.0, 0.0, 0.0], &[1.0]).unwrap();
    assert!(arc.closedness_residual(3).unwrap() > 1e-3);
}

#[test]
fn stokes_on_the_disk() {
    let c = Chart::spacetime();
    let disk = Chain::disk(&c, (0, 1), &[0.2, -0.3, 0.4, 0.1], 0.9).unwrap();
    let rim = disk.boundary().unwrap();
    for w in [
        one_form(&["x*y^2 + t", "sin(x) + z*x", "y", "x*y*z"]),
        one_form(&["exp(x*y)", "cos(x - y)", "0", "1"]),
        one_form(&["-y^3", "x^3 + x*y", "z^2", "t"]),
    ] {
        let inner = disk.integrate(&w.d()).unwrap().value;
        let outer = rim.integrate(&w).unwrap().value;
        assert!((inner - outer).abs() <= 1e-8 * inner.abs().max(1.0), "{inner} vs {outer}");
    }
}

#[test]
fn stokes_on_a_box() {
    let c = Chart::spacetime();
    let cube = Chain::box_cell(&c, &[0, 1, 3], &[0.1, -0.2, 0.3, 0.0], &[1.0, 0.5, 0.8]).unwrap();
    let eta = DifferentialForm::new(
        &c,
        2,
        [
            (vec![0, 1], st("x*t + y^2")),
            (vec![1, 3], st("sin(x*y)")),
            (vec![0, 3], st("exp(-t)*y")),
        ],
    )
    .unwrap();
    let inner = cube.integrate(&eta.d()).unwrap().value;
    let outer = cube.boundary().unwrap().integrate(&eta).unwrap().value;
    assert!((inner - outer).abs() < 1e-10 * inner.abs().max(1.0));
}

#[test]
fn degree_mismatch_and_singular_cells() {
    let c = Chart::spacetime();
    let circle = Chain::circle(&c, (0, 1), &ORIGIN, 1.0, 1).unwrap();
    let f = DifferentialForm::basis(&c, &[0, 1]).unwrap();
    assert!(matches!(circle.integrate(&f), Err(Error::Usage(_))));
    let through = Chain::box_cell(&c, &[0], &[-1.0, 0.0, 0.0, 0.0], &[2.0]).unwrap();
    // Order 3 puts the middle node at s = 1/2, i.e. the origin.
    let w = one_form(&["1/(x^2 + y^2)", "0", "0", "0"]);
    assert!(matches!(through.integrate_at(&w, 3), Err(Error::Cell { cell: 0, .. })));
}

#[test]
fn advection_examples() {
    let c = Chart::spacetime();
    let circle = Chain::circle(&c, (0, 1), &ORIGIN, 1.0, 1).unwrap().with_order(8);
    let before = circle.node_images().unwrap();

    let still = circle.advect(&VectorField::zero(&c), 1.0).unwrap();
    assert_eq!(still.node_images().unwrap(), before);

    let shifted = circle.advect(&VectorField::basis(&c, 0).unwrap(), 1.0).unwrap();
    for (a, b) in before.iter().zip(shifted.node_images().unwrap()) {
        assert!((b[0] - a[0] - 1.0).abs() < 1e-12 && (b[1] - a[1]).abs() < 1e-12);
    }

    let rot = field(&["-y", "x", "0", "0"]);
    let turned = circle.advect(&rot, PI / 2.0).unwrap();
    for p in turned.node_images().unwrap() {
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-10);
    }
    let w = one_form(&["x*y^2 + sin(y)", "x^3", "0", "0"]);
    let a = circle.integrate_at(&w, 16).unwrap().0;
    let b = circle.advect(&rot, PI / 2.0).unwrap().integrate_at(&w, 16).unwrap().0;
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn advection_reports_blow_up() {
    let c = Chart::spacetime();
    let pt = Chain::point(&c, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let v = field(&["x^2", "0", "0", "0"]);
    assert!(matches!(pt.advect(&v, 2.0).unwrap().node_images(), Err(Error::Advection(_))));
}

#[test]
fn circulation_invariance_under_rotation_and_drift_under_stretch() {
    let c = Chart::spacetime();
    let circle = Chain::circle(&c, (0, 1), &[0.3, 0.2, 0.0, 0.0], 1.0, 1).unwrap();
    let a = one_form(&["0", "x", "0", "0"]);
    let rot = field(&["-y", "x", "0", "0"]);
    let r = invariance_check(&a, &circle, &rot, InvarianceMode::Relative).unwrap();
    assert!(r.invariant, "{r:?}");

    let stretch = field(&["x", "0", "0", "0"]);
    let r = invariance_check(&a, &circle, &stretch, InvarianceMode::Relative).unwrap();
    assert!(!r.invariant);
    assert!((r.derivative - PI).abs() < 1e-8);
    assert!(r.transport_holds(), "{r:?}");

    let open = Chain::box_cell(&c, &[0], &ORIGIN, &[1.0]).unwrap();
    assert!(matches!(
        invariance_check(&a, &open, &rot, InvarianceMode::Relative),
        Err(Error::Usage(_))
    ));
}

#[test]
fn flux_of_a_closed_two_form_is_invariant() {
    let c = Chart::spacetime();
    let a = one_form(&["y*z", "x^2*t", "sin(x)", "z"]);
    let f = a.d();
    let sphere = Chain::sphere(&c, [0, 1, 2], &[0.1, 0.0, -0.2, 0.5], 0.8).unwrap().with_order(12);
    let v = field(&["y + t", "-x*z", "1", "1"]);
    let r = invariance_check(&f, &sphere, &v, InvarianceMode::Relative).unwrap();
    assert!(r.invariant, "{r:?}");
    // A non-closed 2-form does drift, and the drift matches int L(V) w.
    let w = f.scale(&st("x"));
    let r = invariance_check(&w, &sphere, &v, InvarianceMode::Relative).unwrap();
    assert!(r.transport_holds(), "{r:?}");
}

#[test]
fn quadrature_converges() {
    let c = Chart::spacetime();
    let disk = Chain::disk(&c, (0, 1), &ORIGIN, 1.0).unwrap();
    let w = DifferentialForm::basis(&c, &[0, 1]).unwrap().scale(&st("exp(x)*cos(y)"));
    let i = disk.integrate(&w).unwrap();
    assert!(i.error < 1e-10);
}
