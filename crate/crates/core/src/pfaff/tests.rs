use super::*;
use crate::expr::{parse_expr, ZeroVerdict};

fn scalar_zero(e: &ScalarExpr, domain: &SamplingBox) -> Result<bool> {
    Ok(matches!(e.is_zero(domain)?, ZeroVerdict::Zero))
}

fn sbox() -> SamplingBox {
    SamplingBox::cube(4, -1.5, 1.5)
}

fn form(chart: &Arc<Chart>, comps: &[&str]) -> DifferentialForm {
    let c = comps.iter().map(|s| parse_expr(s, chart).unwrap()).collect();
    DifferentialForm::one_form(chart, c).unwrap()
}

type V3 = [ScalarExpr; 3];

fn cross(a: &V3, b: &V3) -> V3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &V3, b: &V3) -> ScalarExpr {
    &a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]
}

/// E and B from a potential, written out by hand.
fn fields(a: &V3, phi: &ScalarExpr) -> (V3, V3) {
    let e = [0, 1, 2].map(|i| -a[i].differentiate(3) - phi.differentiate(i));
    let b = [
        a[2].differentiate(1) - a[1].differentiate(2),
        a[0].differentiate(2) - a[2].differentiate(0),
        a[1].differentiate(0) - a[0].differentiate(1),
    ];
    (e, b)
}

fn zero(e: &ScalarExpr) -> bool {
    scalar_zero(e, &sbox()).unwrap()
}

fn torsion_potential() -> (V3, ScalarExpr) {
    let c = Chart::spacetime();
    let p = |s: &str| parse_expr(s, &c).unwrap();
    (
        [p("-y + z*t"), p("x + sin(t)"), p("x*y/2")],
        p("z/2 + x*t"),
    )
}

#[test]
fn pfaff_dimensions() {
    let c = Chart::spacetime();
    let dx = form(&c, &["1", "0", "0", "0"]);
    assert_eq!(pfaff_sequence(&dx, &sbox()).unwrap().dimension, 1);

    let c3 = Chart::new(["x", "y", "z"]).unwrap();
    let contact = form(&c3, &["-y", "0", "1"]);
    let s = pfaff_sequence(&contact, &SamplingBox::cube(3, -1.0, 1.0)).unwrap();
    assert_eq!(s.elements.len(), 3);
    assert_eq!(s.dimension, 3);
    assert_eq!(s.pointwise_dimension(&[0.3, 0.2, 0.1], &Params::new(), 1e-12).unwrap(), 3);

    let (a, phi) = torsion_potential();
    let em = em_action(&c, a, phi).unwrap();
    let s = pfaff_sequence(&em, &sbox()).unwrap();
    assert_eq!(s.dimension, 4);
    assert_eq!(s.elements.len(), 4);
}

#[test]
fn frobenius_examples() {
    let c = Chart::spacetime();
    // x^2 d(y + t)
    let a = form(&c, &["0", "x^2", "0", "x^2"]);
    assert!(frobenius_integrable(&a, &sbox()).unwrap());
    let c3 = Chart::new(["x", "y", "z"]).unwrap();
    assert!(!frobenius_integrable(&form(&c3, &["-y", "0", "1"]), &SamplingBox::cube(3, -1.0, 1.0)).unwrap());
    // Potential flow v = grad(phi), phi = (x*y + z^2)*exp(-t), with the
    // Bernoulli pressure making H = -d(phi)/dt; then A = d(phi).
    let g = form(&c, &["y*exp(-t)", "x*exp(-t)", "2*z*exp(-t)", "-(x*y + z^2)*exp(-t)"]);
    assert!(g.d().is_syntactically_zero());
    assert!(frobenius_integrable(&g, &sbox()).unwrap());
}

#[test]
fn topological_base_shape() {
    let c = Chart::spacetime();
    let (a, phi) = torsion_potential();
    let base = topological_base(&em_action(&c, a, phi).unwrap(), &sbox()).unwrap();
    let labels: Vec<_> = base.elements.iter().map(|e| e.label.as_str()).collect();
    assert_eq!(labels, ["A", "A u dA", "A^dA", "A^dA u dA^dA"]);
    assert!(base.disconnected);
    let dz = form(&c, &["0", "0", "1", "0"]);
    assert!(!topological_base(&dz, &sbox()).unwrap().disconnected);
}

#[test]
fn em_torsion_matches_vector_formulas() {
    let c = Chart::spacetime();
    let (a, phi) = torsion_potential();
    let (e, b) = fields(&a, &phi);
    let action = em_action(&c, a.clone(), phi.clone()).unwrap();
    let td = torsion_data(&action, &sbox()).unwrap();

    let ea = cross(&e, &a);
    for i in 0..3 {
        let expected = &ea[i] + &(&phi * &b[i]);
        assert!(zero(&(&td.current[i] - &expected)), "current component {i}");
    }
    assert!(zero(&(&td.helicity - &dot(&a, &b))));
    let eb = dot(&e, &b);
    assert!(zero(&(&td.gamma - &eb)));
    // Our orientation gives K = +2 E.B.
    assert!(zero(&(&td.k - &(ScalarExpr::int(2) * eb))));
    let (mean, dev) = td.parity_ratio(&sbox()).unwrap().unwrap();
    assert!((mean - 2.0).abs() < 1e-9 && dev < 1e-9);

    // L(T)A = Gamma A through the Cartan formula, independently of extraction.
    let lie = action.lie_derivative(&td.vector).unwrap();
    assert!(lie.try_sub(&action.scale(&td.gamma)).unwrap().is_zero(&sbox()).unwrap().is_zero());
}

#[test]
fn integrable_torsion_is_trivial() {
    let c = Chart::spacetime();
    let a = form(&c, &["0", "x^2", "0", "x^2"]);
    let td = torsion_data(&a, &sbox()).unwrap();
    assert!(td.vector.is_syntactically_zero());
    assert!(td.gamma.is_zero_const());
    assert!(td.k.is_zero_const());
    assert!(td.parity_ratio(&sbox()).unwrap().is_none());
}

#[test]
fn kinematic_action_torsion() {
    // A = v.dr - H dt for a time dependent shear-plus-swirl velocity.
    let c = Chart::spacetime();
    let p = |s: &str| parse_expr(s, &c).unwrap();
    let v = [p("-y*exp(-t)"), p("x*exp(-t)"), p("sin(x)")];
    let h = p("(x^2 + y^2)*exp(-2*t)/2 + sin(x)^2/2 + z");
    let (acc, omega) = fields(&v, &h);
    let td = torsion_data(&em_action(&c, v.clone(), h.clone()).unwrap(), &sbox()).unwrap();
    let ta = cross(&acc, &v);
    for i in 0..3 {
        assert!(zero(&(&td.current[i] - &(&ta[i] + &(&h * &omega[i])))));
    }
    assert!(zero(&(&td.helicity - &dot(&v, &omega))));
    let (_, k) = parity(&em_action(&c, v, h).unwrap()).unwrap();
    assert!(zero(&(&k - &(ScalarExpr::int(2) * dot(&acc, &omega)))));
}

#[test]
fn dh_equals_k() {
    let c = Chart::spacetime();
    let a = form(&c, &["x*t + y", "cos(z)*x", "exp(-x*y)", "z*t^2"]);
    let (k, _) = parity(&a).unwrap();
    let h = a.wedge(&a.d()).unwrap();
    assert!(h.d().try_sub(&k).unwrap().is_syntactically_zero());
}

#[test]
fn characteristic_spaces() {
    let c2 = Chart::new(["x", "y"]).unwrap();
    let dx = form(&c2, &["1", "0"]);
    let ch = characteristic_space(&dx, &[0.1, 0.2], &Params::new()).unwrap();
    assert_eq!(ch.len(), 1);
    assert!(ch[0][0].abs() < 1e-12 && (ch[0][1].abs() - 1.0).abs() < 1e-12);

    let c3 = Chart::new(["x", "y", "z"]).unwrap();
    let contact = form(&c3, &["-y", "0", "1"]);
    let pt = [0.3, 0.7, -0.2];
    assert_eq!(extremal_space(&contact, &pt, &Params::new()).unwrap().len(), 1);
    assert_eq!(field_rank(&contact, &pt, &Params::new()).unwrap(), 2);
    // The extremal direction is not annihilated by A, so nothing survives both.
    assert!(characteristic_space(&contact, &pt, &Params::new()).unwrap().is_empty());

    let c = Chart::spacetime();
    let (a, phi) = torsion_potential();
    let em = em_action(&c, a, phi).unwrap();
    let pt = [0.4, -0.3, 0.2, 0.5];
    assert!(extremal_space(&em, &pt, &Params::new()).unwrap().is_empty());
    assert!(characteristic_space(&em, &pt, &Params::new()).unwrap().is_empty());
}

#[test]
fn genus_examples() {
    let c = Chart::spacetime();
    let dz = form(&c, &["0", "0", "1", "0"]);
    assert_eq!(genus_diagnostic(&dz, &sbox()).unwrap().genus, 3);
    let integrable = form(&c, &["0", "x^2", "0", "x^2"]);
    assert_eq!(genus_diagnostic(&integrable, &sbox()).unwrap().genus, 3);
    let (a, phi) = torsion_potential();
    let g = genus_diagnostic(&em_action(&c, a, phi).unwrap(), &sbox()).unwrap();
    assert_eq!(g.genus, 2);
    assert!(!g.torsion_current_zero);
    assert_eq!(g.current_form.degree(), 2);
}

#[test]
fn projectivize_examples() {
    let c = Chart::spacetime();
    let a = form(&c, &["3", "0", "0", "0"]);
    let p = projectivize(&a, &sbox()).unwrap();
    assert_eq!(p.form, form(&c, &["1", "0", "0", "0"]));
    assert!(p.euler_integrand.unwrap().is_zero_const());

    let (pot, phi) = torsion_potential();
    let em = em_action(&c, pot, phi + ScalarExpr::int(5)).unwrap();
    let p1 = projectivize(&em, &sbox()).unwrap();
    let p5 = projectivize(&em.scale(&ScalarExpr::int(5)), &sbox()).unwrap();
    assert_eq!(p1.form, p5.form);

    // Not a mere rescaling of the original parity density.
    let (_, k) = parity(&em).unwrap();
    let lam2 = (&p1.lambda * &p1.lambda).simplify();
    let naive = (k / lam2).simplify();
    assert!(!zero(&(p1.euler_integrand.unwrap() - naive)));

    let zero_form = form(&c, &["x", "0", "0", "0"]);
    let centred = projectivize(&zero_form, &SamplingBox::cube(4, -1.0, 1.0));
    assert!(matches!(centred, Err(Error::Singularity { .. })));
}
