//! Eigenstructure of the structured pencil and the neutral-subspace
//! construction.
//!
//! The pipeline needs an `nm`-dimensional subspace that is both
//! `M_r`-invariant and neutral for the block anti-diagonal metric. Such a
//! subspace is spanned by selected columns of the transformation matrix `S`
//! of the real Jordan form `M_r = S J S^{-1}`:
//!
//! 1. a real Jordan block of (even) size `r` contributes its first `r/2`
//!    columns;
//! 2. a complex-pair block with even `s` contributes its first `s` columns;
//! 3. complex-pair blocks with odd `s` are matched in pairs sharing
//!    `(alpha, beta)`; a pair contributes the first `s_j - 1` and `s_p - 1`
//!    columns of the two blocks plus two cross-block combinations.
//!
//! Jordan forms are not computable stably in general. The generic path
//! implemented by [`generic_eigenstructure`] assumes every eigenvalue has
//! algebraic multiplicity 2 and geometric multiplicity 1, which holds for
//! almost every Gram-generated polynomial; it needs only eigenvectors,
//! computed as smallest singular vectors of the shifted pencil. Anything
//! beyond that regime must be supplied as exact [`RealJordanData`].

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::linalg;

/// Relative floor on `sigma_min / sigma_max` below which a matrix counts as
/// numerically singular.
pub const DEFAULT_INV_TOL: f64 = 1e-12;

/// Relative tolerance for validating supplied Jordan data against the pencil.
pub const DEFAULT_JORDAN_TOL: f64 = 1e-6;

/// Relative cutoff for the truncated least-squares solves that estimate
/// generalized eigenvectors.
const GENERALIZED_LS_CUTOFF: f64 = 1e-8;

/// Factor between the fine clustering tolerance and the coarse one used to
/// tell "needs exact Jordan data" apart from "odd multiplicity". Defective
/// blocks of size `k` scatter computed eigenvalues by roughly `eps^(1/k)`,
/// so the coarse pass must be much looser than the generic `eps^(1/2)` scale.
pub const COARSE_CLUSTER_FACTOR: f64 = 1e3;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("eigenvalue clustering failed: {detail}")]
    ClusterFailure { detail: String },
    #[error("eigenstructure beyond the generic case ({detail}); supply exact Jordan data")]
    DefectiveBeyondGeneric { detail: String },
    #[error("real Jordan block at lambda={lambda} has odd size {size}; no real factorization exists")]
    OddRealBlock { lambda: f64, size: usize },
    #[error("odd-size complex block at alpha={alpha}, beta={beta} has no partner with matching eigenvalue")]
    UnpairedOddBlock { alpha: f64, beta: f64 },
    #[error("X1 is numerically singular (sigma_min/sigma_max = {ratio:.3e}); the selected subspace is not a graph subspace")]
    SingularX1 { ratio: f64 },
    #[error("invalid Jordan data: {0}")]
    InvalidJordanData(String),
}

/// What a Jordan block describes: one real eigenvalue or a conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum JordanBlockKind {
    Real { lambda: f64 },
    ComplexPair { alpha: f64, beta: f64 },
}

/// One block of a real Jordan form and the columns of `S` it owns.
///
/// `size` is `r_j` for a real block (occupying `r_j` columns) and `s_j` for a
/// complex-pair block (occupying `2 s_j` columns).
#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlockDesc {
    pub kind: JordanBlockKind,
    pub size: usize,
    pub col_start: usize,
}

impl JordanBlockDesc {
    /// Number of columns of `S` owned by this block.
    pub fn ncols(&self) -> usize {
        match self.kind {
            JordanBlockKind::Real { .. } => self.size,
            JordanBlockKind::ComplexPair { .. } => 2 * self.size,
        }
    }
}

/// A real Jordan decomposition `M_r = S J S^{-1}` given by the transformation
/// matrix and the ordered block descriptors.
#[derive(Debug, Clone)]
pub struct RealJordanData {
    s: DMatrix<f64>,
    blocks: Vec<JordanBlockDesc>,
}

impl RealJordanData {
    /// Build from a square `S` and block descriptors. The blocks must tile
    /// the columns of `S` contiguously, in order, without gaps or overlap.
    pub fn new(s: DMatrix<f64>, blocks: Vec<JordanBlockDesc>) -> Result<Self, EigenError> {
        if !s.is_square() {
            return Err(EigenError::InvalidJordanData(format!(
                "S is {}x{}, expected square",
                s.nrows(),
                s.ncols()
            )));
        }
        let mut next = 0usize;
        for b in &blocks {
            if b.size == 0 {
                return Err(EigenError::InvalidJordanData(
                    "block of size 0".to_string(),
                ));
            }
            if let JordanBlockKind::ComplexPair { beta, .. } = b.kind {
                if beta <= 0.0 {
                    return Err(EigenError::InvalidJordanData(format!(
                        "complex block must have beta > 0, got {beta}"
                    )));
                }
            }
            if b.col_start != next {
                return Err(EigenError::InvalidJordanData(format!(
                    "block starting at column {} leaves a gap or overlap (expected {})",
                    b.col_start, next
                )));
            }
            next += b.ncols();
        }
        if next != s.ncols() {
            return Err(EigenError::InvalidJordanData(format!(
                "blocks cover {} columns, S has {}",
                next,
                s.ncols()
            )));
        }
        Ok(Self { s, blocks })
    }

    pub fn s(&self) -> &DMatrix<f64> {
        &self.s
    }

    pub fn blocks(&self) -> &[JordanBlockDesc] {
        &self.blocks
    }

    /// Reassemble the block-diagonal `J` described by the blocks.
    pub fn assemble_jordan(&self) -> DMatrix<f64> {
        let k = self.s.ncols();
        let mut j = DMatrix::<f64>::zeros(k, k);
        for b in &self.blocks {
            let o = b.col_start;
            match b.kind {
                JordanBlockKind::Real { lambda } => {
                    for i in 0..b.size {
                        j[(o + i, o + i)] = lambda;
                        if i + 1 < b.size {
                            j[(o + i, o + i + 1)] = 1.0;
                        }
                    }
                }
                JordanBlockKind::ComplexPair { alpha, beta } => {
                    for i in 0..b.size {
                        let d = o + 2 * i;
                        j[(d, d)] = alpha;
                        j[(d + 1, d + 1)] = alpha;
                        j[(d, d + 1)] = beta;
                        j[(d + 1, d)] = -beta;
                        if i + 1 < b.size {
                            j[(d, d + 2)] = 1.0;
                            j[(d + 1, d + 3)] = 1.0;
                        }
                    }
                }
            }
        }
        j
    }

    /// Check `||M_r S - S J||_F <= jordan_tol ||M_r||_F` and that `S` is
    /// numerically invertible.
    pub fn validate_against(
        &self,
        mr: &DMatrix<f64>,
        jordan_tol: f64,
        inv_tol: f64,
    ) -> Result<(), EigenError> {
        if self.s.nrows() != mr.nrows() {
            return Err(EigenError::InvalidJordanData(format!(
                "S is {}x{} but the pencil is {}x{}",
                self.s.nrows(),
                self.s.ncols(),
                mr.nrows(),
                mr.ncols()
            )));
        }
        let j = self.assemble_jordan();
        let residual = (mr * &self.s - &self.s * j).norm();
        let bound = jordan_tol * mr.norm();
        if residual > bound {
            return Err(EigenError::InvalidJordanData(format!(
                "||M_r S - S J|| = {residual:.3e} exceeds {bound:.3e}"
            )));
        }
        let cond = linalg::inverse_condition(&self.s);
        if cond < inv_tol {
            return Err(EigenError::InvalidJordanData(format!(
                "S is numerically singular (sigma_min/sigma_max = {cond:.3e})"
            )));
        }
        Ok(())
    }
}

/// A `2nm x nm` matrix whose column space is the invariant neutral subspace,
/// split into the top and bottom square blocks.
#[derive(Debug, Clone)]
pub struct NeutralSubspace {
    y: DMatrix<f64>,
}

impl NeutralSubspace {
    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    fn half(&self) -> usize {
        self.y.nrows() / 2
    }

    /// Top `nm x nm` block.
    pub fn x1(&self) -> DMatrix<f64> {
        let nm = self.half();
        self.y.view((0, 0), (nm, nm)).into_owned()
    }

    /// Bottom `nm x nm` block.
    pub fn x2(&self) -> DMatrix<f64> {
        let nm = self.half();
        self.y.view((nm, 0), (nm, nm)).into_owned()
    }
}

/// One cluster of computed eigenvalues: a real eigenvalue with its algebraic
/// multiplicity, or a conjugate pair `alpha +/- i beta` counted once per copy
/// of `alpha + i beta`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumCluster {
    Real { lambda: f64, multiplicity: usize },
    ComplexPair { alpha: f64, beta: f64, multiplicity: usize },
}

impl SpectrumCluster {
    pub fn multiplicity(&self) -> usize {
        match *self {
            SpectrumCluster::Real { multiplicity, .. } => multiplicity,
            SpectrumCluster::ComplexPair { multiplicity, .. } => multiplicity,
        }
    }

    fn sort_key(&self) -> (f64, f64) {
        match *self {
            SpectrumCluster::Real { lambda, .. } => (lambda, 0.0),
            SpectrumCluster::ComplexPair { alpha, beta, .. } => (alpha, beta),
        }
    }
}

/// Verdict on whether the spectrum admits the generic construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumVerdict {
    /// Every cluster is a double eigenvalue: the generic path applies.
    FactorizableGeneric,
    /// Multiplicities are even but too high for the generic path; exact
    /// Jordan data is required.
    NeedsExactJordan,
    /// An odd multiplicity was detected; no real factorization of this
    /// degree exists.
    NotFactorizable,
}

/// Cluster the computed spectrum of `mr` by single linkage at distance
/// `cluster_tol`, merging conjugate clusters into [`SpectrumCluster`] values
/// sorted by `(re, im)`.
pub fn cluster_spectrum(mr: &DMatrix<f64>, cluster_tol: f64) -> Vec<SpectrumCluster> {
    let eig = mr.clone().complex_eigenvalues();
    let mut ev: Vec<(f64, f64)> = eig.iter().map(|c| (c.re, c.im)).collect();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    // single-linkage components
    let k = ev.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..k {
        for j in (i + 1)..k {
            let d = ((ev[i].0 - ev[j].0).powi(2) + (ev[i].1 - ev[j].1).powi(2)).sqrt();
            if d <= cluster_tol {
                let (pi, pj) = (find(&mut parent, i), find(&mut parent, j));
                if pi != pj {
                    parent[pi.max(pj)] = pi.min(pj);
                }
            }
        }
    }
    let mut comp_members: Vec<Vec<usize>> = Vec::new();
    let mut comp_of_root: Vec<Option<usize>> = vec![None; k];
    for i in 0..k {
        let r = find(&mut parent, i);
        match comp_of_root[r] {
            Some(c) => comp_members[c].push(i),
            None => {
                comp_of_root[r] = Some(comp_members.len());
                comp_members.push(vec![i]);
            }
        }
    }

    struct Comp {
        re: f64,
        im: f64,
        size: usize,
    }
    let mut comps: Vec<Comp> = comp_members
        .iter()
        .map(|members| {
            let re = members.iter().map(|&i| ev[i].0).sum::<f64>() / members.len() as f64;
            let im = members.iter().map(|&i| ev[i].1).sum::<f64>() / members.len() as f64;
            Comp {
                re,
                im,
                size: members.len(),
            }
        })
        .collect();
    comps.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    let mut out: Vec<SpectrumCluster> = Vec::new();
    let mut used = vec![false; comps.len()];
    for i in 0..comps.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let c = &comps[i];
        if c.im.abs() <= cluster_tol {
            out.push(SpectrumCluster::Real {
                lambda: c.re,
                multiplicity: c.size,
            });
            continue;
        }
        // match with the closest unused mirror component
        let mut best: Option<(usize, f64)> = None;
        for (j, cj) in comps.iter().enumerate() {
            if used[j] || cj.im * c.im >= 0.0 {
                continue;
            }
            let d = ((cj.re - c.re).powi(2) + (cj.im + c.im).powi(2)).sqrt();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        match best {
            Some((j, _)) if comps[j].size == c.size => {
                used[j] = true;
                let alpha = 0.5 * (c.re + comps[j].re);
                let beta = 0.5 * (c.im - comps[j].im).abs();
                out.push(SpectrumCluster::ComplexPair {
                    alpha,
                    beta,
                    multiplicity: c.size,
                });
            }
            _ => {
                // no mirror of equal size: report the component on its own so
                // the parity checks downstream see the inconsistency
                out.push(SpectrumCluster::ComplexPair {
                    alpha: c.re,
                    beta: c.im.abs(),
                    multiplicity: c.size,
                });
            }
        }
    }
    out.sort_by(|a, b| {
        let (ar, ai) = a.sort_key();
        let (br, bi) = b.sort_key();
        ar.total_cmp(&br).then(ai.total_cmp(&bi))
    });
    out
}

fn spectrum_parity(clusters: &[SpectrumCluster]) -> SpectrumVerdict {
    let mut generic = true;
    for c in clusters {
        let mult = c.multiplicity();
        if mult % 2 != 0 {
            return SpectrumVerdict::NotFactorizable;
        }
        if mult != 2 {
            generic = false;
        }
    }
    if generic {
        SpectrumVerdict::FactorizableGeneric
    } else {
        SpectrumVerdict::NeedsExactJordan
    }
}

/// Cluster the spectrum at `cluster_tol` and classify it.
///
/// An odd multiplicity at the fine tolerance is rechecked at a coarse
/// tolerance before declaring the polynomial not factorizable: defective
/// blocks of size above two scatter their computed eigenvalues far wider
/// than the generic double eigenvalues do.
pub fn classify_spectrum(
    mr: &DMatrix<f64>,
    cluster_tol: f64,
) -> (Vec<SpectrumCluster>, SpectrumVerdict) {
    let fine = cluster_spectrum(mr, cluster_tol);
    let verdict = match spectrum_parity(&fine) {
        SpectrumVerdict::NotFactorizable => {
            let coarse = cluster_spectrum(mr, cluster_tol * COARSE_CLUSTER_FACTOR);
            match spectrum_parity(&coarse) {
                SpectrumVerdict::NotFactorizable => SpectrumVerdict::NotFactorizable,
                _ => SpectrumVerdict::NeedsExactJordan,
            }
        }
        v => v,
    };
    (fine, verdict)
}

/// Compute the generic eigenstructure of the pencil: every eigenvalue must
/// form a double cluster (real pair or conjugate quadruple).
///
/// Each real double eigenvalue contributes a size-2 block whose first column
/// is the eigenvector, computed as the right singular vector of the smallest
/// singular value of `M_r - lambda I` about the cluster mean. Conjugate
/// quadruples contribute one complex-pair block with `s = 2`, whose first two
/// columns hold the real and imaginary parts of the eigenvector. The
/// remaining columns are filled with least-squares estimates of generalized
/// eigenvectors; the generic subspace construction never consumes them, they
/// only keep the Jordan data well formed.
pub fn generic_eigenstructure(
    mr: &DMatrix<f64>,
    cluster_tol: f64,
) -> Result<RealJordanData, EigenError> {
    let (clusters, _) = classify_spectrum(mr, cluster_tol);
    for c in &clusters {
        let mult = c.multiplicity();
        if mult % 2 != 0 {
            let coarse = cluster_spectrum(mr, cluster_tol * COARSE_CLUSTER_FACTOR);
            let detail = match c {
                SpectrumCluster::Real { lambda, .. } => {
                    format!("eigenvalue {lambda:.6} has odd multiplicity {mult}")
                }
                SpectrumCluster::ComplexPair { alpha, beta, .. } => {
                    format!("eigenvalue {alpha:.6}+/-{beta:.6}i has odd multiplicity {mult}")
                }
            };
            if spectrum_parity(&coarse) == SpectrumVerdict::NotFactorizable {
                return Err(EigenError::ClusterFailure { detail });
            }
            return Err(EigenError::DefectiveBeyondGeneric {
                detail: format!("{detail} at the generic tolerance but clusters evenly at a coarse one"),
            });
        }
        if mult != 2 {
            let detail = match c {
                SpectrumCluster::Real { lambda, .. } => {
                    format!("eigenvalue {lambda:.6} has multiplicity {mult} > 2")
                }
                SpectrumCluster::ComplexPair { alpha, beta, .. } => {
                    format!("eigenvalue {alpha:.6}+/-{beta:.6}i has multiplicity {mult} > 2")
                }
            };
            return Err(EigenError::DefectiveBeyondGeneric { detail });
        }
    }

    let k = mr.nrows();
    let mut s = DMatrix::<f64>::zeros(k, k);
    let mut blocks = Vec::with_capacity(clusters.len());
    let mut col = 0usize;
    for c in &clusters {
        match *c {
            SpectrumCluster::Real { lambda, .. } => {
                let shifted = mr - DMatrix::<f64>::identity(k, k) * lambda;
                let (_, mut v) = linalg::smallest_singular_vector(&shifted);
                normalize_sign(&mut v);
                let w = linalg::truncated_least_squares(&shifted, &v, GENERALIZED_LS_CUTOFF);
                s.view_mut((0, col), (k, 1)).copy_from(&v);
                s.view_mut((0, col + 1), (k, 1)).copy_from(&w);
                blocks.push(JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda },
                    size: 2,
                    col_start: col,
                });
                col += 2;
            }
            SpectrumCluster::ComplexPair { alpha, beta, .. } => {
                let realified = linalg::realified_complex_shift(mr, alpha, beta);
                let (_, w) = linalg::smallest_singular_vector(&realified);
                let (mut p, mut q) = split_realified(&w, k);
                normalize_phase(&mut p, &mut q);
                let mut rhs = DVector::<f64>::zeros(2 * k);
                rhs.view_mut((0, 0), (k, 1)).copy_from(&p);
                rhs.view_mut((k, 0), (k, 1)).copy_from(&q);
                let gw = linalg::truncated_least_squares(&realified, &rhs, GENERALIZED_LS_CUTOFF);
                let (gp, gq) = split_realified(&gw, k);
                s.view_mut((0, col), (k, 1)).copy_from(&p);
                s.view_mut((0, col + 1), (k, 1)).copy_from(&q);
                s.view_mut((0, col + 2), (k, 1)).copy_from(&gp);
                s.view_mut((0, col + 3), (k, 1)).copy_from(&gq);
                blocks.push(JordanBlockDesc {
                    kind: JordanBlockKind::ComplexPair { alpha, beta },
                    size: 2,
                    col_start: col,
                });
                col += 4;
            }
        }
    }
    debug_assert_eq!(col, k);
    RealJordanData::new(s, blocks)
}

fn split_realified(w: &DVector<f64>, k: usize) -> (DVector<f64>, DVector<f64>) {
    (
        w.rows(0, k).into_owned(),
        w.rows(k, k).into_owned(),
    )
}

/// Flip the sign so the largest-magnitude entry is positive.
fn normalize_sign(v: &mut DVector<f64>) {
    let mut idx = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[idx].abs() {
            idx = i;
        }
    }
    if v[idx] < 0.0 {
        *v = -&*v;
    }
}

/// Rotate the complex vector `p + i q` so its largest-modulus entry is real
/// and positive.
fn normalize_phase(p: &mut DVector<f64>, q: &mut DVector<f64>) {
    let mut idx = 0;
    let mut best = 0.0f64;
    for i in 0..p.len() {
        let m = p[i] * p[i] + q[i] * q[i];
        if m > best {
            best = m;
            idx = i;
        }
    }
    let r = best.sqrt();
    if r == 0.0 {
        return;
    }
    let (cr, ci) = (p[idx] / r, -q[idx] / r);
    let new_p = &*p * cr - &*q * ci;
    let new_q = &*q * cr + &*p * ci;
    *p = new_p;
    *q = new_q;
}

/// Apply the column-selection rules to form the `2nm x nm` matrix `Y`.
///
/// Rule 3 matches odd-size complex-pair blocks sharing `(alpha, beta)`:
/// candidates are sorted by `(alpha, beta, size)` and paired consecutively.
/// The cross-block combinations assume `S` carries canonical Jordan data, as
/// produced by exact computation.
pub fn construct_y(jd: &RealJordanData) -> Result<NeutralSubspace, EigenError> {
    let total = jd.s().ncols();
    if total % 2 != 0 {
        return Err(EigenError::InvalidJordanData(format!(
            "S has odd size {total}"
        )));
    }
    let nm = total / 2;
    let mut cols: Vec<usize> = Vec::new(); // indices into S
    let mut combos: Vec<(usize, usize, f64)> = Vec::new(); // (col a, col b, sign of b)
    let mut odd_blocks: Vec<&JordanBlockDesc> = Vec::new();

    for b in jd.blocks() {
        match b.kind {
            JordanBlockKind::Real { lambda } => {
                if b.size % 2 != 0 {
                    return Err(EigenError::OddRealBlock {
                        lambda,
                        size: b.size,
                    });
                }
                cols.extend(b.col_start..b.col_start + b.size / 2);
            }
            JordanBlockKind::ComplexPair { .. } => {
                if b.size % 2 == 0 {
                    cols.extend(b.col_start..b.col_start + b.size);
                } else {
                    odd_blocks.push(b);
                }
            }
        }
    }

    odd_blocks.sort_by(|a, b| {
        let ka = block_eig(a);
        let kb = block_eig(b);
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(a.size.cmp(&b.size))
            .then(a.col_start.cmp(&b.col_start))
    });
    let mut i = 0;
    while i < odd_blocks.len() {
        let bj = odd_blocks[i];
        let (aj, bej) = block_eig(bj);
        if i + 1 >= odd_blocks.len() {
            return Err(EigenError::UnpairedOddBlock {
                alpha: aj,
                beta: bej,
            });
        }
        let bp = odd_blocks[i + 1];
        let (ap, bep) = block_eig(bp);
        let match_tol = 1e-8 * (1.0 + aj.abs() + bej.abs());
        if (aj - ap).abs() > match_tol || (bej - bep).abs() > match_tol {
            return Err(EigenError::UnpairedOddBlock {
                alpha: aj,
                beta: bej,
            });
        }
        let (sj, sp) = (bj.size, bp.size);
        let (gj, gp) = (bj.col_start, bp.col_start);
        // first s_j - 1 columns of block j, first s_p - 1 of block p
        cols.extend(gj..gj + sj - 1);
        cols.extend(gp..gp + sp - 1);
        // column s_j of block j plus column s_p + 1 of block p (1-based)
        combos.push((gj + sj - 1, gp + sp, 1.0));
        // column s_j + 1 of block j minus column s_p of block p (1-based)
        combos.push((gj + sj, gp + sp - 1, -1.0));
        i += 2;
    }

    let rows = jd.s().nrows();
    let mut y = DMatrix::<f64>::zeros(rows, nm);
    let mut out_col = 0usize;
    for &c in &cols {
        y.view_mut((0, out_col), (rows, 1))
            .copy_from(&jd.s().column(c));
        out_col += 1;
    }
    for &(a, b, sign) in &combos {
        let combined = jd.s().column(a) + jd.s().column(b) * sign;
        y.view_mut((0, out_col), (rows, 1)).copy_from(&combined);
        out_col += 1;
    }
    debug_assert_eq!(out_col, nm);
    Ok(NeutralSubspace { y })
}

fn block_eig(b: &JordanBlockDesc) -> (f64, f64) {
    match b.kind {
        JordanBlockKind::Real { lambda } => (lambda, 0.0),
        JordanBlockKind::ComplexPair { alpha, beta } => (alpha, beta),
    }
}

/// Solve `X = X2 X1^{-1}` from the subspace blocks.
///
/// Fails when `X1` is numerically singular relative to `inv_tol`, which
/// signals that the selected subspace is not a graph subspace.
pub fn solve_x(ns: &NeutralSubspace, inv_tol: f64) -> Result<DMatrix<f64>, EigenError> {
    let x1 = ns.x1();
    let x2 = ns.x2();
    let svd = x1.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let smin = svd
        .singular_values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    if ratio < inv_tol {
        return Err(EigenError::SingularX1 { ratio });
    }
    let pinv = svd.pseudo_inverse(0.0).expect("SVD computed with U and V");
    Ok(x2 * pinv)
}

/// Invariance residual `||M_r Y - Y (Y^+ M_r Y)||_F` of the subspace.
pub fn invariance_residual(ns: &NeutralSubspace, mr: &DMatrix<f64>) -> f64 {
    let y = ns.y();
    let pinv = y
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-13)
        .expect("SVD computed with U and V");
    let restriction = &pinv * mr * y;
    (mr * y - y * restriction).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::riccati::{build_pencil, build_riccati_data, neutrality_defect, riccati_residual};
    use crate::testdata::{example_one, example_two, x_example_one, x_example_two};

    fn mr_of(q: &crate::MatPoly) -> DMatrix<f64> {
        build_pencil(&build_riccati_data(q).unwrap()).mr().clone()
    }

    fn default_tol(mr: &DMatrix<f64>) -> f64 {
        1e-6 * (1.0 + mr.norm())
    }

    #[test]
    fn example_one_clusters_into_two_real_pairs() {
        let mr = mr_of(&example_one());
        let clusters = cluster_spectrum(&mr, default_tol(&mr));
        assert_eq!(clusters.len(), 2);
        match (&clusters[0], &clusters[1]) {
            (
                SpectrumCluster::Real {
                    lambda: l0,
                    multiplicity: 2,
                },
                SpectrumCluster::Real {
                    lambda: l1,
                    multiplicity: 2,
                },
            ) => {
                assert!((l0 + 3.0).abs() < 1e-6);
                assert!(l1.abs() < 1e-6);
            }
            other => panic!("unexpected clusters {other:?}"),
        }
    }

    #[test]
    fn example_two_clusters_into_one_quadruple() {
        let mr = mr_of(&example_two());
        let clusters = cluster_spectrum(&mr, default_tol(&mr));
        assert_eq!(clusters.len(), 1);
        match clusters[0] {
            SpectrumCluster::ComplexPair {
                alpha,
                beta,
                multiplicity: 2,
            } => {
                assert!((alpha + 1.5).abs() < 1e-6);
                assert!((beta - 11.0f64.sqrt() / 2.0).abs() < 1e-6);
            }
            ref other => panic!("unexpected cluster {other:?}"),
        }
    }

    #[test]
    fn squared_scalar_clusters_as_complex_quadruple() {
        // Q = (1 + x^2)^2 = 1 + 2x^2 + x^4: reversed polynomial has roots
        // +/- i, each double.
        let q = crate::MatPoly::scalar(&[1.0, 0.0, 2.0, 0.0, 1.0]);
        let mr = mr_of(&q);
        let clusters = cluster_spectrum(&mr, default_tol(&mr));
        assert_eq!(clusters.len(), 1);
        match clusters[0] {
            SpectrumCluster::ComplexPair {
                alpha,
                beta,
                multiplicity: 2,
            } => {
                assert!(alpha.abs() < 1e-7);
                assert!((beta - 1.0).abs() < 1e-7);
            }
            ref other => panic!("unexpected cluster {other:?}"),
        }
    }

    #[test]
    fn generic_blocks_for_example_one() {
        let mr = mr_of(&example_one());
        let jd = generic_eigenstructure(&mr, default_tol(&mr)).unwrap();
        assert_eq!(jd.blocks().len(), 2);
        let lambdas: Vec<f64> = jd
            .blocks()
            .iter()
            .map(|b| match b.kind {
                JordanBlockKind::Real { lambda } => lambda,
                _ => panic!("expected real blocks"),
            })
            .collect();
        assert!((lambdas[0] + 3.0).abs() < 1e-6);
        assert!(lambdas[1].abs() < 1e-6);
        assert!(jd.blocks().iter().all(|b| b.size == 2));
        jd.validate_against(&mr, 1e-5, 1e-10).unwrap();
    }

    #[test]
    fn generic_path_reproduces_example_one_solution() {
        let q = example_one();
        let rd = build_riccati_data(&q).unwrap();
        let pencil = build_pencil(&rd);
        let jd = generic_eigenstructure(pencil.mr(), default_tol(pencil.mr())).unwrap();
        let ns = construct_y(&jd).unwrap();
        assert!(neutrality_defect(ns.y(), pencil.hhat()) <= 1e-8 * ns.y().norm().powi(2));
        let x = solve_x(&ns, DEFAULT_INV_TOL).unwrap();
        assert!(crate::linalg::max_abs(&(&x - x_example_one())) <= 1e-8);
        assert!(riccati_residual(&x, &rd) <= 1e-7 * (1.0 + rd.p().norm()));
    }

    #[test]
    fn generic_path_reproduces_example_two_solution() {
        let q = example_two();
        let rd = build_riccati_data(&q).unwrap();
        let pencil = build_pencil(&rd);
        let jd = generic_eigenstructure(pencil.mr(), default_tol(pencil.mr())).unwrap();
        let ns = construct_y(&jd).unwrap();
        let x = solve_x(&ns, DEFAULT_INV_TOL).unwrap();
        assert!(crate::linalg::max_abs(&(&x - x_example_two())) <= 1e-8);
    }

    #[test]
    fn simple_eigenvalues_fail_clustering() {
        // Q = 1 + x^2 has reversed polynomial with simple roots +/- i.
        let q = crate::MatPoly::scalar(&[1.0, 0.0, 1.0]);
        let mr = mr_of(&q);
        let err = generic_eigenstructure(&mr, default_tol(&mr)).unwrap_err();
        assert!(matches!(err, EigenError::ClusterFailure { .. }), "{err}");
    }

    #[test]
    fn real_quadruple_needs_exact_jordan() {
        // Q = (1+x)^4: the pencil is a single J_4(-1), whose computed
        // eigenvalues scatter at the eps^(1/4) scale.
        let q = crate::MatPoly::scalar(&[1.0, 4.0, 6.0, 4.0, 1.0]);
        let mr = mr_of(&q);
        let err = generic_eigenstructure(&mr, default_tol(&mr)).unwrap_err();
        assert!(
            matches!(err, EigenError::DefectiveBeyondGeneric { .. }),
            "{err}"
        );
        let (_, verdict) = classify_spectrum(&mr, default_tol(&mr));
        assert_eq!(verdict, SpectrumVerdict::NeedsExactJordan);
    }

    #[test]
    fn verdicts_for_worked_examples() {
        for q in [example_one(), example_two()] {
            let mr = mr_of(&q);
            let (_, verdict) = classify_spectrum(&mr, default_tol(&mr));
            assert_eq!(verdict, SpectrumVerdict::FactorizableGeneric);
        }
        let q = crate::MatPoly::scalar(&[1.0, 0.0, 1.0]);
        let mr = mr_of(&q);
        let (clusters, verdict) = classify_spectrum(&mr, default_tol(&mr));
        assert_eq!(verdict, SpectrumVerdict::NotFactorizable);
        assert!(clusters.iter().all(|c| c.multiplicity() == 1));
    }

    #[test]
    fn construct_y_takes_prefix_of_even_real_block() {
        // one real block of size 4 on a 4x4 identity-like S
        let s = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 2.0, 3.0, 4.0, //
                0.0, 1.0, 2.0, 3.0, //
                0.0, 0.0, 1.0, 2.0, //
                0.0, 0.0, 0.0, 1.0,
            ],
        );
        let jd = RealJordanData::new(
            s.clone(),
            vec![JordanBlockDesc {
                kind: JordanBlockKind::Real { lambda: -1.0 },
                size: 4,
                col_start: 0,
            }],
        )
        .unwrap();
        let ns = construct_y(&jd).unwrap();
        assert_eq!(ns.y().ncols(), 2);
        assert_eq!(ns.y().column(0), s.column(0));
        assert_eq!(ns.y().column(1), s.column(1));
    }

    #[test]
    fn construct_y_rejects_odd_real_block() {
        let jd = RealJordanData::new(
            DMatrix::identity(4, 4),
            vec![
                JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda: 1.0 },
                    size: 3,
                    col_start: 0,
                },
                JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda: 2.0 },
                    size: 1,
                    col_start: 3,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            construct_y(&jd).unwrap_err(),
            EigenError::OddRealBlock { size: 3, .. }
        ));
    }

    #[test]
    fn construct_y_rejects_unpairable_odd_complex_blocks() {
        let jd = RealJordanData::new(
            DMatrix::identity(4, 4),
            vec![
                JordanBlockDesc {
                    kind: JordanBlockKind::ComplexPair {
                        alpha: 0.0,
                        beta: 1.0,
                    },
                    size: 1,
                    col_start: 0,
                },
                JordanBlockDesc {
                    kind: JordanBlockKind::ComplexPair {
                        alpha: 0.0,
                        beta: 2.0,
                    },
                    size: 1,
                    col_start: 2,
                },
            ],
        )
        .unwrap();
        assert!(matches!(
            construct_y(&jd).unwrap_err(),
            EigenError::UnpairedOddBlock { .. }
        ));
    }

    #[test]
    fn rule_three_pairing_on_sip_metric() {
        // J = J_6(a±ib) ⊕ J_6(a±ib) with s = 3 odd and S = I: the output must
        // be exactly neutral for the reversal metric P_6 ⊕ P_6.
        let blocks = vec![
            JordanBlockDesc {
                kind: JordanBlockKind::ComplexPair {
                    alpha: -1.0,
                    beta: 2.0,
                },
                size: 3,
                col_start: 0,
            },
            JordanBlockDesc {
                kind: JordanBlockKind::ComplexPair {
                    alpha: -1.0,
                    beta: 2.0,
                },
                size: 3,
                col_start: 6,
            },
        ];
        let jd = RealJordanData::new(DMatrix::identity(12, 12), blocks).unwrap();
        let ns = construct_y(&jd).unwrap();
        assert_eq!(ns.y().ncols(), 6);
        let mut metric = DMatrix::<f64>::zeros(12, 12);
        for i in 0..6 {
            metric[(i, 5 - i)] = 1.0;
            metric[(6 + i, 11 - i)] = 1.0;
        }
        assert_eq!(neutrality_defect(ns.y(), &metric), 0.0);
    }

    #[test]
    fn solve_x_rejects_singular_top_block() {
        let mut y = DMatrix::<f64>::zeros(4, 2);
        // X1 = [[1,0],[0,0]] singular
        y[(0, 0)] = 1.0;
        y[(2, 1)] = 1.0;
        y[(3, 0)] = 1.0;
        let ns = NeutralSubspace { y };
        assert!(matches!(
            solve_x(&ns, DEFAULT_INV_TOL).unwrap_err(),
            EigenError::SingularX1 { .. }
        ));
    }

    #[test]
    fn scalar_degree_two_gives_zero_x() {
        // n = 1, m = 1: the only 1x1 skew matrix is 0.
        let q = crate::MatPoly::scalar(&[1.0, 2.0, 1.0]);
        let mr = mr_of(&q);
        let jd = generic_eigenstructure(&mr, default_tol(&mr)).unwrap();
        let ns = construct_y(&jd).unwrap();
        let x = solve_x(&ns, DEFAULT_INV_TOL).unwrap();
        assert!(x[(0, 0)].abs() <= 1e-10);
    }

    #[test]
    fn jordan_data_rejects_bad_tilings() {
        let err = RealJordanData::new(
            DMatrix::identity(4, 4),
            vec![JordanBlockDesc {
                kind: JordanBlockKind::Real { lambda: 0.0 },
                size: 2,
                col_start: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, EigenError::InvalidJordanData(_)));

        let err = RealJordanData::new(
            DMatrix::identity(4, 4),
            vec![
                JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda: 0.0 },
                    size: 2,
                    col_start: 0,
                },
                JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda: 0.0 },
                    size: 2,
                    col_start: 1,
                },
            ],
        )
        .unwrap_err();
        assert!(matches!(err, EigenError::InvalidJordanData(_)));
    }

    #[test]
    fn assemble_jordan_layouts() {
        let jd = RealJordanData::new(
            DMatrix::identity(6, 6),
            vec![
                JordanBlockDesc {
                    kind: JordanBlockKind::Real { lambda: 2.0 },
                    size: 2,
                    col_start: 0,
                },
                JordanBlockDesc {
                    kind: JordanBlockKind::ComplexPair {
                        alpha: 1.0,
                        beta: 3.0,
                    },
                    size: 2,
                    col_start: 2,
                },
            ],
        )
        .unwrap();
        let j = jd.assemble_jordan();
        let expected = DMatrix::from_row_slice(
            6,
            6,
            &[
                2.0, 1.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 2.0, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 1.0, 3.0, 1.0, 0.0, //
                0.0, 0.0, -3.0, 1.0, 0.0, 1.0, //
                0.0, 0.0, 0.0, 0.0, 1.0, 3.0, //
                0.0, 0.0, 0.0, 0.0, -3.0, 1.0,
            ],
        );
        assert_eq!(j, expected);
    }
}
