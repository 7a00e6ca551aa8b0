//! Lie derivative from the flow: `d/ds (Phi_s^* w)` at `s = 0`, with
//! `Phi_s` integrated by RK4 and its Jacobian by the variational equation,
//! where `DV` comes from central differences of `V` alone.

use std::collections::BTreeMap;

use cartan::{DifferentialForm, Params, Result, VectorField};

const FD_STEP: f64 = 1e-6;

fn jacobian_of_field(v: &VectorField, x: &[f64], params: &Params) -> Result<Vec<Vec<f64>>> {
    let n = x.len();
    let mut jac = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut a = x.to_vec();
        let mut b = x.to_vec();
        a[j] += FD_STEP;
        b[j] -= FD_STEP;
        let fa = v.eval(&a, params)?;
        let fb = v.eval(&b, params)?;
        for i in 0..n {
            jac[i][j] = (fa[i] - fb[i]) / (2.0 * FD_STEP);
        }
    }
    Ok(jac)
}

/// State: position followed by the row-major Jacobian.
fn rhs(v: &VectorField, state: &[f64], n: usize, params: &Params) -> Result<Vec<f64>> {
    let x = &state[..n];
    let mut out = v.eval(x, params)?;
    let dv = jacobian_of_field(v, x, params)?;
    for i in 0..n {
        for j in 0..n {
            let s: f64 = (0..n).map(|k| dv[i][k] * state[n + k * n + j]).sum();
            out.push(s);
        }
    }
    Ok(out)
}

/// `(Phi_s(p), D Phi_s(p))`.
pub fn flow(v: &VectorField, p: &[f64], s: f64, steps: usize, params: &Params) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = p.len();
    let mut state = p.to_vec();
    for i in 0..n {
        for j in 0..n {
            state.push(if i == j { 1.0 } else { 0.0 });
        }
    }
    let h = s / steps as f64;
    let axpy = |a: &[f64], k: &[f64], c: f64| a.iter().zip(k).map(|(x, y)| x + c * y).collect::<Vec<_>>();
    for _ in 0..steps {
        let k1 = rhs(v, &state, n, params)?;
        let k2 = rhs(v, &axpy(&state, &k1, h / 2.0), n, params)?;
        let k3 = rhs(v, &axpy(&state, &k2, h / 2.0), n, params)?;
        let k4 = rhs(v, &axpy(&state, &k3, h), n, params)?;
        for i in 0..state.len() {
            state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    let x = state[..n].to_vec();
    let jac = (0..n).map(|i| state[n + i * n..n + (i + 1) * n].to_vec()).collect();
    Ok((x, jac))
}

pub fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        d *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    d
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for mut rest in combinations(n, k - 1) {
            if rest.first().is_none_or(|&r| r > first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
    }
    out
}

/// All coefficients of `Phi_s^* w` at `p`.
pub fn pulled_back(
    w: &DifferentialForm,
    v: &VectorField,
    p: &[f64],
    s: f64,
    params: &Params,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let n = p.len();
    let k = w.degree();
    let steps = ((s.abs() / 0.002).ceil() as usize).max(4);
    let (x, jac) = flow(v, p, s, steps, params)?;
    let coeffs = w.eval(&x, params)?;
    let mut out = BTreeMap::new();
    for cols in combinations(n, k) {
        let mut total = 0.0;
        for (rows, c) in &coeffs {
            let minor = rows.iter().map(|&r| cols.iter().map(|&q| jac[r][q]).collect()).collect();
            total += c * det(minor);
        }
        out.insert(cols, total);
    }
    Ok(out)
}

/// Richardson-extrapolated central difference of the pullback in `s`.
pub fn lie_by_pullback(
    w: &DifferentialForm,
    v: &VectorField,
    p: &[f64],
    h: f64,
    params: &Params,
) -> Result<BTreeMap<Vec<usize>, f64>> {
    let central = |h: f64| -> Result<BTreeMap<Vec<usize>, f64>> {
        let plus = pulled_back(w, v, p, h, params)?;
        let minus = pulled_back(w, v, p, -h, params)?;
        Ok(plus.iter().map(|(i, a)| (i.clone(), (a - minus[i]) / (2.0 * h))).collect())
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok(fine.iter().map(|(i, f)| (i.clone(), (4.0 * f - coarse[i]) / 3.0)).collect())
}
