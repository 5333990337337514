//! Small dense linear algebra helpers shared across the crate.
//!
//! Everything here wraps `nalgebra` decompositions with the conventions used
//! by the factorization pipeline: relative rank thresholds, symmetric parts,
//! and smallest singular vectors of (complex-)shifted matrices.

use nalgebra::{DMatrix, DVector};

/// Max-norm (largest absolute entry). Zero for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest absolute entry of `M - M^T`.
pub fn sym_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Symmetric part `(M + M^T) / 2`.
pub fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Skew-symmetric part `(M - M^T) / 2`.
pub fn skew_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Eigenvalues of the symmetric part of `m`, sorted ascending.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = symmetric_part(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_sym_eigenvalue(m: &DMatrix<f64>) -> f64 {
    sym_eigenvalues(m)[0]
}

/// Symmetric PSD square root and inverse square root via the spectral
/// decomposition. Fails with the offending eigenvalue when `m` has an
/// eigenvalue below `floor`.
pub fn spd_sqrt_pair(m: &DMatrix<f64>, floor: f64) -> Result<(DMatrix<f64>, DMatrix<f64>), f64> {
    let eig = symmetric_part(m).symmetric_eigen();
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < floor {
        return Err(min);
    }
    let v = &eig.eigenvectors;
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let inv_sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let sqrt = v * sqrt_d * v.transpose();
    let inv_sqrt = v * inv_sqrt_d * v.transpose();
    Ok((symmetric_part(&sqrt), symmetric_part(&inv_sqrt)))
}

/// Numerical rank: number of singular values `>= rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s >= rel_tol * smax).count()
}

/// Ratio of smallest to largest singular value (0 for the zero matrix).
pub fn inverse_condition(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let smax = sv.iter().copied().fold(0.0f64, f64::max);
    let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if smax == 0.0 {
        0.0
    } else {
        smin / smax
    }
}

/// Right singular vector for the smallest singular value of `m`, together
/// with that singular value.
pub fn smallest_singular_vector(m: &DMatrix<f64>) -> (f64, DVector<f64>) {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("SVD must compute V^T");
    let mut idx = 0;
    let mut smin = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s < smin {
            smin = s;
            idx = i;
        }
    }
    (smin, v_t.row(idx).transpose())
}

/// Least-squares solve of `m w = rhs` with singular values below
/// `rel_cutoff * sigma_max` treated as zero.
pub fn truncated_least_squares(
    m: &DMatrix<f64>,
    rhs: &DVector<f64>,
    rel_cutoff: f64,
) -> DVector<f64> {
    let svd = m.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    svd.solve(rhs, rel_cutoff * smax)
        .expect("SVD solve with U and V computed")
}

/// Realification of `M - (alpha + i beta) I`: the real `2k x 2k` matrix whose
/// kernel vectors `[p; q]` correspond to complex kernel vectors `p + i q` of
/// the shifted matrix.
pub fn realified_complex_shift(m: &DMatrix<f64>, alpha: f64, beta: f64) -> DMatrix<f64> {
    let k = m.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let a = m[(i, j)] - if i == j { alpha } else { 0.0 };
            out[(i, j)] = a;
            out[(k + i, k + j)] = a;
        }
        out[(i, k + i)] = beta;
        out[(k + i, i)] = -beta;
    }
    out
}
