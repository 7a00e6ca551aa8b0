//! Three-vector calculus on the space-time chart `(x, y, z, t)`.

use crate::expr::ScalarExpr;

pub type Vec3 = [ScalarExpr; 3];

const T: usize = 3;

pub fn grad(f: &ScalarExpr) -> Vec3 {
    [0, 1, 2].map(|i| f.differentiate(i))
}

pub fn curl(v: &Vec3) -> Vec3 {
    [
        v[2].differentiate(1) - v[1].differentiate(2),
        v[0].differentiate(2) - v[2].differentiate(0),
        v[1].differentiate(0) - v[0].differentiate(1),
    ]
}

pub fn div(v: &Vec3) -> ScalarExpr {
    v[0].differentiate(0) + v[1].differentiate(1) + v[2].differentiate(2)
}

/// Partial derivative in time.
pub fn dt(v: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| v[i].differentiate(T))
}

pub fn dot(a: &Vec3, b: &Vec3) -> ScalarExpr {
    (&a[0] * &b[0] + &a[1] * &b[1] + &a[2] * &b[2]).simplify()
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
    .map(|e| e.simplify())
}

pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (&a[i] + &b[i]).simplify())
}

pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (&a[i] - &b[i]).simplify())
}

pub fn scale(f: &ScalarExpr, a: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (f * &a[i]).simplify())
}

pub fn neg(a: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| (-&a[i]).simplify())
}

pub fn simplify(a: &Vec3) -> Vec3 {
    [0, 1, 2].map(|i| a[i].simplify())
}
