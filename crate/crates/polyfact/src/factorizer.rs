//! End-to-end factorization pipeline.
//!
//! Given a symmetric positive semidefinite `Q` of degree `2m`, the pipeline
//!
//! 1. picks a base point `x0` where `Q(x0)` is safely positive definite,
//! 2. shifts to `p_hat(x) = Q(x + x0)` and congruence-normalizes the constant
//!    coefficient to the identity,
//! 3. builds the Riccati data and structured pencil,
//! 4. obtains real Jordan data (generic path or supplied exactly),
//! 5. selects the invariant neutral subspace and solves `X = X2 X1^{-1}`,
//! 6. assembles the bordered Gram matrix `F_X`, factors it at rank `n`,
//! 7. maps the factor back through the shift and normalization to `G` with
//!    `Q = G^T G`.
//!
//! The change of variable in step 2 uses the pure shift `x -> x + x0` rather
//! than a reflection; both make the constant term `Q(x0)` and both produce a
//! valid factor, but only the shift leaves the Riccati solution `X` and the
//! matrix `F_X` in the original orientation for inputs whose constant
//! coefficient is already usable (`x0 = 0`).

use nalgebra::DMatrix;
use thiserror::Error;

use crate::eigenstructure::{
    self, construct_y, generic_eigenstructure, EigenError, JordanBlockDesc, RealJordanData,
};
use crate::linalg;
use crate::matpoly::MatPoly;
use crate::riccati::{self, build_pencil, build_riccati_data, RiccatiError};

/// How the base point `x0` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum X0Mode {
    /// Scan `0, 1, -1, 2, -2, ...` for the first well-conditioned PD point.
    Auto,
    /// Use the given value; fails if `Q(x0)` is not positive definite.
    Fixed(f64),
}

/// Where Jordan data comes from.
#[derive(Debug, Clone)]
pub enum JordanSource {
    /// Compute eigenvectors numerically under the generic assumption
    /// (every eigenvalue has algebraic multiplicity 2, geometric 1).
    Generic,
    /// Use externally computed Jordan data for the pencil of the normalized
    /// polynomial (validated before use).
    Supplied(RealJordanData),
}

/// Tolerance knobs of the pipeline. Relative scalings are applied where the
/// quantity has a natural scale; see the field docs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative spectral-gap threshold for the rank-`n` factorization of
    /// `F_X` (and the PSD check on its trailing eigenvalues).
    pub rank_tol: f64,
    /// Absolute floor on eigenvalues of `Q(x0)` for positive definiteness.
    pub psd_tol: f64,
    /// Skew-defect bound on `X`, scaled by `1 + max |X|`.
    pub skew_tol: f64,
    /// Eigenvalue clustering distance, scaled by `1 + ||M_r||_F`.
    pub cluster_tol: f64,
    /// Bound on the max-entry difference between `Q` and `G^T G`.
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        // residual_tol covers randomly generated instances, where defective
        // eigenvector extraction carries O(sqrt(eps)) error; exact-valued
        // inputs pass far below it.
        Self {
            rank_tol: 1e-6,
            psd_tol: 1e-8,
            skew_tol: 1e-8,
            cluster_tol: 1e-6,
            residual_tol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FactorizationOptions {
    pub x0_mode: X0Mode,
    pub tolerances: Tolerances,
    pub jordan_source: JordanSource,
}

impl Default for FactorizationOptions {
    fn default() -> Self {
        Self {
            x0_mode: X0Mode::Auto,
            tolerances: Tolerances::default(),
            jordan_source: JordanSource::Generic,
        }
    }
}

/// Everything the pipeline learned, including the factor itself.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    /// The computed factor with `Q = G^T G` (up to `residual`).
    pub g: MatPoly,
    /// Base point used by the shift.
    pub x0: f64,
    /// Max-entry difference between the coefficients of `Q` and `G^T G`.
    pub residual: f64,
    /// Numerical rank of `F_X` (equals `n` on success).
    pub fx_rank: usize,
    /// Smallest eigenvalue of `F_X` (diagnostic; near zero from below at worst).
    pub fx_min_eig: f64,
    /// `max |X + X^T|` before the skew projection.
    pub skew_defect: f64,
    /// Frobenius norm of the Riccati residual of the solved `X`.
    pub riccati_residual: f64,
    /// Neutrality defect `max |Y^T Hhat Y|` of the selected subspace.
    pub neutrality_defect: f64,
    /// Jordan blocks used by the subspace construction.
    pub eigen_summary: Vec<JordanBlockDesc>,
    /// The skew Riccati solution (after projection).
    pub x: DMatrix<f64>,
    /// The bordered Gram matrix that was factored.
    pub fx: DMatrix<f64>,
}

#[derive(Debug, Error)]
pub enum FactorizeError {
    #[error("input: {0}")]
    InvalidInput(String),
    #[error("choose_x0: no candidate in the scan has a well-conditioned positive definite value")]
    NoRegularPoint,
    #[error("normalize: Q({x0}) is not positive definite (min eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { x0: f64, min_eig: f64 },
    #[error("eigenstructure: odd multiplicity detected, no real factorization of this degree exists ({detail})")]
    OddMultiplicity { detail: String },
    #[error("eigenstructure: {detail}; supply exact Jordan data")]
    DefectiveBeyondGeneric { detail: String },
    #[error("eigenstructure: supplied Jordan data rejected: {0}")]
    InvalidJordanData(String),
    #[error("solve_x: X1 numerically singular (sigma ratio {ratio:.3e})")]
    SingularX1 { ratio: f64 },
    #[error("solve_x: X is not skew-symmetric (defect {defect:.3e} exceeds {tol:.3e}); the subspace is not neutral")]
    SkewDefect { defect: f64, tol: f64 },
    #[error("rank_n_factor: F_X has numerical rank {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("rank_n_factor: F_X is not positive semidefinite (eigenvalue {min_eig:.3e})")]
    NotPsd { min_eig: f64 },
    #[error("verify: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    ResidualExceeded { residual: f64, tol: f64 },
}

impl FactorizeError {
    /// Pipeline stage the error belongs to, for diagnostics.
    pub fn stage(&self) -> &'static str {
        match self {
            FactorizeError::InvalidInput(_) => "input",
            FactorizeError::NoRegularPoint => "choose_x0",
            FactorizeError::NotPositiveDefinite { .. } => "normalize",
            FactorizeError::OddMultiplicity { .. }
            | FactorizeError::DefectiveBeyondGeneric { .. }
            | FactorizeError::InvalidJordanData(_) => "eigenstructure",
            FactorizeError::SingularX1 { .. } | FactorizeError::SkewDefect { .. } => "solve_x",
            FactorizeError::RankMismatch { .. } | FactorizeError::NotPsd { .. } => "rank_n_factor",
            FactorizeError::ResidualExceeded { .. } => "verify",
        }
    }
}

impl From<EigenError> for FactorizeError {
    fn from(e: EigenError) -> Self {
        match e {
            EigenError::ClusterFailure { detail } => FactorizeError::OddMultiplicity { detail },
            EigenError::OddRealBlock { lambda, size } => FactorizeError::OddMultiplicity {
                detail: format!("real Jordan block at {lambda} has odd size {size}"),
            },
            EigenError::UnpairedOddBlock { alpha, beta } => FactorizeError::OddMultiplicity {
                detail: format!("odd complex block at {alpha}+/-{beta}i has no partner"),
            },
            EigenError::DefectiveBeyondGeneric { detail } => {
                FactorizeError::DefectiveBeyondGeneric { detail }
            }
            EigenError::SingularX1 { ratio } => FactorizeError::SingularX1 { ratio },
            EigenError::InvalidJordanData(s) => FactorizeError::InvalidJordanData(s),
        }
    }
}

impl From<RiccatiError> for FactorizeError {
    fn from(e: RiccatiError) -> Self {
        FactorizeError::InvalidInput(e.to_string())
    }
}

/// Number of candidates scanned by [`choose_x0`]: `0, 1, -1, ..., 20, -20`.
const X0_SCAN_LIMIT: i64 = 20;

/// Largest acceptable condition number for `Q(x0)`.
const X0_COND_LIMIT: f64 = 1e8;

/// Pick the first scan candidate `0, 1, -1, 2, -2, ...` where `Q(x0)` has
/// minimum eigenvalue `>= psd_tol` and condition number `<= 1e8`.
///
/// A merely nonzero determinant would satisfy the theory, but a nearly
/// singular `Q(x0)` poisons the congruence normalization, so candidates
/// without a PD margin are skipped.
pub fn choose_x0(q: &MatPoly, psd_tol: f64) -> Result<f64, FactorizeError> {
    let mut candidates = vec![0i64];
    for k in 1..=X0_SCAN_LIMIT {
        candidates.push(k);
        candidates.push(-k);
    }
    for cand in candidates {
        let x0 = cand as f64;
        let ev = linalg::sym_eigenvalues(&q.eval(x0));
        let min = ev[0];
        let max = ev[ev.len() - 1];
        if min >= psd_tol && max <= X0_COND_LIMIT * min {
            return Ok(x0);
        }
    }
    Err(FactorizeError::NoRegularPoint)
}

/// Shift the polynomial to the base point and normalize its constant
/// coefficient to the identity.
///
/// Returns the normalized polynomial `p` (with `p_0 = I` to roundoff) and
/// the symmetric PD square root `W` of `Q(x0)`, so that
/// `Q(x + x0) = W p(x) W`.
pub fn normalize(
    q: &MatPoly,
    x0: f64,
    psd_tol: f64,
) -> Result<(MatPoly, DMatrix<f64>), FactorizeError> {
    let shifted = q.shift(x0);
    let (w, w_inv) = linalg::spd_sqrt_pair(shifted.coeff(0), psd_tol)
        .map_err(|min_eig| FactorizeError::NotPositiveDefinite { x0, min_eig })?;
    Ok((shifted.congruence(&w_inv), w))
}

/// Assemble the bordered Gram matrix
/// `F_X = F_0 + [0 X; 0 0] - [0 0; X 0]` with the overlapping-block layout:
/// `X` is added into rows `0..nm`, columns `n..n+nm` and subtracted from rows
/// `n..n+nm`, columns `0..nm`.
///
/// Only the skew part of `X` enters, which makes the output exactly
/// symmetric; callers record the discarded defect separately.
pub fn assemble_fx(p: &MatPoly, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.dim();
    let m = p.degree() / 2;
    let nm = n * m;
    assert_eq!(x.nrows(), nm, "X must be nm x nm");
    let size = (m + 1) * n;

    let mut fx = DMatrix::<f64>::zeros(size, size);
    fx.view_mut((0, 0), (n, n))
        .copy_from(&DMatrix::identity(n, n));
    for i in 0..m {
        fx.view_mut(((i + 1) * n, (i + 1) * n), (n, n))
            .copy_from(p.coeff(2 * i + 2));
    }
    for i in 0..m {
        let half_odd = p.coeff(2 * i + 1) * 0.5;
        fx.view_mut((i * n, (i + 1) * n), (n, n)).copy_from(&half_odd);
        fx.view_mut(((i + 1) * n, i * n), (n, n))
            .copy_from(&half_odd.transpose());
    }

    let xs = linalg::skew_part(x);
    for i in 0..nm {
        for j in 0..nm {
            fx[(i, n + j)] += xs[(i, j)];
            fx[(n + i, j)] -= xs[(i, j)];
        }
    }
    linalg::symmetric_part(&fx)
}

/// Spectrally factor a PSD matrix of numerical rank `n` into `H^T H` with
/// `H = [H_0 ... H_m]` and return the blocks.
///
/// The factor is gauge-fixed deterministically: an orthogonal rotation makes
/// the leading block `H_0` upper triangular with non-negative diagonal.
pub fn rank_n_factor(
    fx: &DMatrix<f64>,
    n: usize,
    rank_tol: f64,
) -> Result<Vec<DMatrix<f64>>, FactorizeError> {
    let size = fx.nrows();
    assert!(size % n == 0, "F_X size must be a multiple of n");
    let eig = linalg::symmetric_part(fx).symmetric_eigen();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let lambda_max = eig.eigenvalues[order[0]].max(0.0);
    let gap = rank_tol * lambda_max;

    let min_eig = eig.eigenvalues[order[size - 1]];
    if min_eig < -gap {
        return Err(FactorizeError::NotPsd { min_eig });
    }
    let rank = order
        .iter()
        .filter(|&&i| eig.eigenvalues[i] > gap)
        .count();
    if rank != n {
        return Err(FactorizeError::RankMismatch {
            expected: n,
            found: rank,
        });
    }

    // n x size factor: rows sqrt(lambda_i) v_i^T
    let mut h = DMatrix::<f64>::zeros(n, size);
    for (row, &i) in order.iter().take(n).enumerate() {
        let scaled = eig.eigenvectors.column(i) * eig.eigenvalues[i].sqrt();
        h.row_mut(row).copy_from(&scaled.transpose());
    }

    // gauge fixing: rotate so the leading block is triangular with
    // non-negative diagonal
    let h0 = h.view((0, 0), (n, n)).into_owned();
    let qr = h0.qr();
    let mut qmat = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                qmat[(i, j)] = -qmat[(i, j)];
            }
        }
    }
    let rotated = qmat.transpose() * h;

    Ok((0..size / n)
        .map(|j| rotated.view((0, j * n), (n, n)).into_owned())
        .collect())
}

/// Run the whole pipeline.
pub fn factorize(
    q: &MatPoly,
    opts: &FactorizationOptions,
) -> Result<FactorizationReport, FactorizeError> {
    let tols = &opts.tolerances;
    let defect = q.symmetry_defect();
    if defect > q.default_sym_tol() {
        return Err(FactorizeError::InvalidInput(format!(
            "polynomial is not symmetric (defect {defect:.3e})"
        )));
    }
    if q.degree() % 2 != 0 {
        return Err(FactorizeError::InvalidInput(format!(
            "degree {} is odd",
            q.degree()
        )));
    }
    let n = q.dim();
    let m = q.degree() / 2;

    if m == 0 {
        return factorize_constant(q, tols);
    }

    let x0 = match opts.x0_mode {
        X0Mode::Auto => choose_x0(q, tols.psd_tol)?,
        X0Mode::Fixed(v) => v,
    };
    let (p, w) = normalize(q, x0, tols.psd_tol)?;

    let rd = build_riccati_data(&p)?;
    let pencil = build_pencil(&rd);

    let jordan = match &opts.jordan_source {
        JordanSource::Generic => {
            let scaled_tol = tols.cluster_tol * (1.0 + pencil.mr().norm());
            generic_eigenstructure(pencil.mr(), scaled_tol)?
        }
        JordanSource::Supplied(jd) => {
            jd.validate_against(
                pencil.mr(),
                eigenstructure::DEFAULT_JORDAN_TOL,
                eigenstructure::DEFAULT_INV_TOL,
            )?;
            jd.clone()
        }
    };

    let ns = construct_y(&jordan)?;
    let neutrality = riccati::neutrality_defect(ns.y(), pencil.hhat());
    let x_raw = eigenstructure::solve_x(&ns, eigenstructure::DEFAULT_INV_TOL)?;
    let skew_defect = linalg::max_abs(&(&x_raw + x_raw.transpose()));
    let skew_bound = tols.skew_tol * (1.0 + linalg::max_abs(&x_raw));
    if skew_defect > skew_bound {
        return Err(FactorizeError::SkewDefect {
            defect: skew_defect,
            tol: skew_bound,
        });
    }
    let x = linalg::skew_part(&x_raw);
    let riccati_residual = riccati::riccati_residual(&x, &rd);

    let fx = assemble_fx(&p, &x);
    let fx_min_eig = linalg::sym_eigenvalues(&fx)[0];
    let h_blocks = rank_n_factor(&fx, n, tols.rank_tol)?;

    // H(x) solves p = H^T H; map back through the congruence and the shift:
    // G(x) = H(x - x0) W, so that G^T G = W p(x - x0) W = Q(x).
    let h_poly = MatPoly::new(h_blocks).expect("factor blocks are square");
    let g = h_poly.shift(-x0).right_mul(&w);

    let residual = q.max_coeff_diff(&g.gram());
    if residual > tols.residual_tol {
        return Err(FactorizeError::ResidualExceeded {
            residual,
            tol: tols.residual_tol,
        });
    }

    Ok(FactorizationReport {
        g,
        x0,
        residual,
        fx_rank: n,
        fx_min_eig,
        skew_defect,
        riccati_residual,
        neutrality_defect: neutrality,
        eigen_summary: jordan.blocks().to_vec(),
        x,
        fx,
    })
}

/// Degenerate degree-0 case: `Q` constant PSD, `G` its symmetric square root.
fn factorize_constant(
    q: &MatPoly,
    tols: &Tolerances,
) -> Result<FactorizationReport, FactorizeError> {
    let n = q.dim();
    let c = linalg::symmetric_part(q.coeff(0));
    let ev = linalg::sym_eigenvalues(&c);
    if ev[0] < -tols.psd_tol {
        return Err(FactorizeError::NotPsd { min_eig: ev[0] });
    }
    // clamp roundoff-negative eigenvalues to zero before the square root
    let eig = c.clone().symmetric_eigen();
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.max(0.0).sqrt()));
    let g0 = linalg::symmetric_part(&(&eig.eigenvectors * sqrt_d * eig.eigenvectors.transpose()));
    let g = MatPoly::constant(g0);
    let residual = q.max_coeff_diff(&g.gram());
    if residual > tols.residual_tol {
        return Err(FactorizeError::ResidualExceeded {
            residual,
            tol: tols.residual_tol,
        });
    }
    let rank = ev.iter().filter(|&&l| l > tols.rank_tol * ev[n - 1].max(0.0)).count();
    Ok(FactorizationReport {
        g,
        x0: 0.0,
        residual,
        fx_rank: rank,
        fx_min_eig: ev[0],
        skew_defect: 0.0,
        riccati_residual: 0.0,
        neutrality_defect: 0.0,
        eigen_summary: Vec::new(),
        x: DMatrix::zeros(0, 0),
        fx: c,
    })
}
