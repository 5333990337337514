//! Structured matrices of the modified algebraic Riccati equation
//!
//! ```text
//! X S X - X R + R^T X + P = 0,        P = P^T,  S = S^T >= 0,
//! ```
//!
//! together with the predicates that certify a candidate solution: the
//! residual itself, the graph-subspace invariance check, neutrality of a
//! column space with respect to a symmetric metric, and controllability.
//!
//! For a symmetric matrix polynomial `Q` of degree `2m` with `Q_0 = I`, the
//! data is read off the blocks of
//!
//! ```text
//! F_0 = [ I      G12  ]          G12 = [Q_1/2  0 ... 0],
//!       [ G12^T  G22  ],         G22 = tridiag(Q_1/2-free part),
//! ```
//!
//! as `P = G22 - G12^T G12`, `R = A - B G12`, `S = B B^T`, where `A` is the
//! block down-shift and `B` the first-block injection. The associated pencil
//!
//! ```text
//! M_r = [ R  -S  ]      Hhat = [ 0  I ]      H_r = Hhat * M_r = [ P  R^T ]
//!       [ P  R^T ],            [ I  0 ],                        [ R  -S  ]
//! ```
//!
//! makes `x I - M_r` a linearization of the degree-reversed polynomial, and
//! `M_r` is both `Hhat`- and `H_r`-symmetric.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;
use crate::matpoly::MatPoly;

/// Default relative rank threshold for the controllability test. The
/// constructed pairs sit far from the rank boundary, so the value is not
/// delicate.
pub const DEFAULT_CONTROLLABILITY_RANK_TOL: f64 = 1e-10;

/// Tolerance for the `Q_0 = I` check on normalized input.
const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum RiccatiError {
    #[error("polynomial is not symmetric (defect {defect:.3e} exceeds {tol:.3e})")]
    NotSymmetric { defect: f64, tol: f64 },
    #[error("degree {degree} is odd; the factorization needs an even declared degree")]
    OddDegree { degree: usize },
    #[error("degree 0 polynomial has no Riccati data; handle the constant case separately")]
    DegreeZero,
    #[error(
        "constant coefficient differs from the identity by {defect:.3e}; normalize the input first"
    )]
    ConstantNotIdentity { defect: f64 },
}

/// The matrices `(P, R, S)` of the modified Riccati equation for a normalized
/// polynomial, together with the `F_0` blocks they were built from.
#[derive(Debug, Clone)]
pub struct RiccatiData {
    n: usize,
    m: usize,
    p: DMatrix<f64>,
    r: DMatrix<f64>,
    s: DMatrix<f64>,
    gamma12: DMatrix<f64>,
    gamma22: DMatrix<f64>,
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl RiccatiData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Side length `n * m` of `P`, `R`, `S`.
    pub fn nm(&self) -> usize {
        self.n * self.m
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn gamma12(&self) -> &DMatrix<f64> {
        &self.gamma12
    }

    pub fn gamma22(&self) -> &DMatrix<f64> {
        &self.gamma22
    }

    /// Block down-shift matrix.
    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// First-block injection.
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
}

/// The structured `2nm x 2nm` matrices attached to [`RiccatiData`].
#[derive(Debug, Clone)]
pub struct StructuredPencil {
    mr: DMatrix<f64>,
    hhat: DMatrix<f64>,
    hr: DMatrix<f64>,
}

impl StructuredPencil {
    pub fn mr(&self) -> &DMatrix<f64> {
        &self.mr
    }

    /// Block anti-diagonal identity `[0 I; I 0]`.
    pub fn hhat(&self) -> &DMatrix<f64> {
        &self.hhat
    }

    /// `Hhat * M_r`, equal to `[P R^T; R -S]`.
    pub fn hr(&self) -> &DMatrix<f64> {
        &self.hr
    }

    /// Side length `2nm`.
    pub fn size(&self) -> usize {
        self.mr.nrows()
    }
}

/// Read the Riccati data off a normalized symmetric polynomial of degree
/// `2m` with constant coefficient `I`.
pub fn build_riccati_data(poly: &MatPoly) -> Result<RiccatiData, RiccatiError> {
    let defect = poly.symmetry_defect();
    let tol = poly.default_sym_tol();
    if defect > tol {
        return Err(RiccatiError::NotSymmetric { defect, tol });
    }
    let degree = poly.degree();
    if degree == 0 {
        return Err(RiccatiError::DegreeZero);
    }
    if degree % 2 != 0 {
        return Err(RiccatiError::OddDegree { degree });
    }
    let n = poly.dim();
    let id_defect = linalg::max_abs(&(poly.coeff(0) - DMatrix::<f64>::identity(n, n)));
    if id_defect > IDENTITY_TOL {
        return Err(RiccatiError::ConstantNotIdentity { defect: id_defect });
    }

    let m = degree / 2;
    let nm = n * m;

    // Top strip of F_0 without its identity block: [Q_1/2, 0, ..., 0].
    let mut gamma12 = DMatrix::<f64>::zeros(n, nm);
    gamma12
        .view_mut((0, 0), (n, n))
        .copy_from(&(poly.coeff(1) * 0.5));

    // Lower-right block of F_0: diagonal Q_2, Q_4, ..., Q_2m with
    // off-diagonal Q_3/2, ..., Q_{2m-1}/2.
    let mut gamma22 = DMatrix::<f64>::zeros(nm, nm);
    for i in 0..m {
        gamma22
            .view_mut((i * n, i * n), (n, n))
            .copy_from(poly.coeff(2 * i + 2));
        if i + 1 < m {
            let half_odd = poly.coeff(2 * i + 3) * 0.5;
            gamma22
                .view_mut((i * n, (i + 1) * n), (n, n))
                .copy_from(&half_odd);
            gamma22
                .view_mut(((i + 1) * n, i * n), (n, n))
                .copy_from(&half_odd);
        }
    }

    let mut a = DMatrix::<f64>::zeros(nm, nm);
    for i in 0..m.saturating_sub(1) {
        a.view_mut(((i + 1) * n, i * n), (n, n))
            .copy_from(&DMatrix::identity(n, n));
    }
    let mut b = DMatrix::<f64>::zeros(nm, n);
    b.view_mut((0, 0), (n, n))
        .copy_from(&DMatrix::identity(n, n));

    let p = &gamma22 - gamma12.transpose() * &gamma12;
    let r = &a - &b * &gamma12;
    let s = &b * b.transpose();

    Ok(RiccatiData {
        n,
        m,
        p,
        r,
        s,
        gamma12,
        gamma22,
        a,
        b,
    })
}

/// Assemble the structured matrices `M_r`, `Hhat`, `H_r`.
///
/// `H_r` is formed as `Hhat * M_r` so the identity between the two holds
/// exactly; tests cross-check it against the direct `[P R^T; R -S]` layout.
pub fn build_pencil(rd: &RiccatiData) -> StructuredPencil {
    let nm = rd.nm();
    let mut mr = DMatrix::<f64>::zeros(2 * nm, 2 * nm);
    mr.view_mut((0, 0), (nm, nm)).copy_from(&rd.r);
    mr.view_mut((0, nm), (nm, nm)).copy_from(&(-&rd.s));
    mr.view_mut((nm, 0), (nm, nm)).copy_from(&rd.p);
    mr.view_mut((nm, nm), (nm, nm)).copy_from(&rd.r.transpose());

    let mut hhat = DMatrix::<f64>::zeros(2 * nm, 2 * nm);
    for i in 0..nm {
        hhat[(i, nm + i)] = 1.0;
        hhat[(nm + i, i)] = 1.0;
    }

    let hr = &hhat * &mr;
    StructuredPencil { mr, hhat, hr }
}

/// Frobenius norm of the Riccati residual `X S X - X R + R^T X + P`.
pub fn riccati_residual(x: &DMatrix<f64>, rd: &RiccatiData) -> f64 {
    (x * &rd.s * x - x * &rd.r + rd.r.transpose() * x + &rd.p).norm()
}

/// Frobenius norm of `M_r [I; X] - [I; X] (R - S X)`; a near-zero value
/// certifies that the graph subspace of `X` is `M_r`-invariant.
pub fn graph_check(x: &DMatrix<f64>, pencil: &StructuredPencil, rd: &RiccatiData) -> f64 {
    let nm = rd.nm();
    let mut graph = DMatrix::<f64>::zeros(2 * nm, nm);
    graph
        .view_mut((0, 0), (nm, nm))
        .copy_from(&DMatrix::identity(nm, nm));
    graph.view_mut((nm, 0), (nm, nm)).copy_from(x);
    let z = &rd.r - &rd.s * x;
    (&pencil.mr * &graph - graph * z).norm()
}

/// Largest absolute entry of `Y^T H Y`; zero means the column space of `Y`
/// is neutral for the symmetric metric `H`.
pub fn neutrality_defect(y: &DMatrix<f64>, h: &DMatrix<f64>) -> f64 {
    linalg::max_abs(&(y.transpose() * h * y))
}

/// Kalman rank test: whether `[B, AB, ..., A^(k-1) B]` has full row rank `k`,
/// with rank counted by singular values `>= rank_tol * sigma_max`.
pub fn is_controllable(a: &DMatrix<f64>, b: &DMatrix<f64>, rank_tol: f64) -> bool {
    let k = a.nrows();
    assert_eq!(a.ncols(), k, "A must be square");
    assert_eq!(b.nrows(), k, "B must have as many rows as A");
    let cols = b.ncols();
    let mut krylov = DMatrix::<f64>::zeros(k, k * cols);
    let mut power = b.clone();
    for block in 0..k {
        krylov
            .view_mut((0, block * cols), (k, cols))
            .copy_from(&power);
        power = a * power;
    }
    linalg::numerical_rank(&krylov, rank_tol) == k
}
