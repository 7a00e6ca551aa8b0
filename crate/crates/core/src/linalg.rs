//! Small dense helpers on top of nalgebra.

use nalgebra::DMatrix;

/// Orthonormal basis of the null space of `m`, using singular values below
/// `rel_tol * max(1, sigma_max)`.
pub fn null_space(m: &DMatrix<f64>, rel_tol: f64) -> Vec<Vec<f64>> {
    let cols = m.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Pad to at least square so the SVD returns a full right basis.
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = rel_tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= tol)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Numerical rank with the same threshold as [`null_space`].
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    m.ncols() - null_space(m, rel_tol).len()
}
