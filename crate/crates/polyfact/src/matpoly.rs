//! Dense real matrix polynomials.
//!
//! A [`MatPoly`] is a polynomial with `n x n` real matrix coefficients,
//! stored as the ordered list `C_0, ..., C_d` (coefficient of `x^i` at index
//! `i`). The degree is declared by the coefficient list and never inferred:
//! trailing zero coefficients are kept, since the factorization pipeline
//! needs the declared degree `2m` even when the leading coefficient is
//! singular or zero.
//!
//! All values are immutable after construction and all operations are pure.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::linalg;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatPolyError {
    #[error("coefficient list is empty")]
    Empty,
    #[error("coefficient {index} is {rows}x{cols}, expected {dim}x{dim}")]
    ShapeMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        dim: usize,
    },
}

/// A real `n x n` matrix polynomial `sum_i C_i x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatPoly {
    dim: usize,
    coeffs: Vec<DMatrix<f64>>,
}

impl MatPoly {
    /// Build from the ordered coefficient list `C_0, ..., C_d`.
    ///
    /// All coefficients must be square with matching dimension; the list
    /// defines the declared degree `d = coeffs.len() - 1`.
    pub fn new(coeffs: Vec<DMatrix<f64>>) -> Result<Self, MatPolyError> {
        let dim = coeffs.first().ok_or(MatPolyError::Empty)?.nrows();
        if dim == 0 {
            return Err(MatPolyError::Empty);
        }
        for (index, c) in coeffs.iter().enumerate() {
            if c.nrows() != dim || c.ncols() != dim {
                return Err(MatPolyError::ShapeMismatch {
                    index,
                    rows: c.nrows(),
                    cols: c.ncols(),
                    dim,
                });
            }
        }
        Ok(Self { dim, coeffs })
    }

    /// Degree-0 polynomial with the given constant coefficient.
    pub fn constant(c: DMatrix<f64>) -> Self {
        assert!(c.is_square() && c.nrows() > 0, "constant must be square");
        Self {
            dim: c.nrows(),
            coeffs: vec![c],
        }
    }

    /// The constant identity polynomial of dimension `n`.
    pub fn identity(n: usize) -> Self {
        Self::constant(DMatrix::identity(n, n))
    }

    /// Scalar (`1 x 1`) polynomial from plain coefficients.
    pub fn scalar(coeffs: &[f64]) -> Self {
        assert!(!coeffs.is_empty(), "scalar polynomial needs a coefficient");
        Self {
            dim: 1,
            coeffs: coeffs
                .iter()
                .map(|&c| DMatrix::from_row_slice(1, 1, &[c]))
                .collect(),
        }
    }

    /// Matrix dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Declared degree `d` (the coefficient list has `d + 1` entries).
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `x^i`.
    pub fn coeff(&self, i: usize) -> &DMatrix<f64> {
        &self.coeffs[i]
    }

    /// All coefficients, lowest degree first.
    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    /// Largest absolute entry over all coefficients.
    pub fn max_coeff_abs(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(0.0, |acc, c| acc.max(linalg::max_abs(c)))
    }

    /// Largest entry of `C_i - C_i^T` over all coefficients.
    pub fn symmetry_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .fold(0.0, |acc, c| acc.max(linalg::sym_defect(c)))
    }

    /// Default symmetry tolerance, scaled so large-norm inputs do not fail
    /// spuriously: `1e-10 * (1 + max |entry|)`.
    pub fn default_sym_tol(&self) -> f64 {
        1e-10 * (1.0 + self.max_coeff_abs())
    }

    /// Whether every coefficient is symmetric within [`Self::default_sym_tol`].
    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect() <= self.default_sym_tol()
    }

    /// Evaluate at `x` by Horner's scheme.
    pub fn eval(&self, x: f64) -> DMatrix<f64> {
        let mut acc = self.coeffs[self.degree()].clone();
        for i in (0..self.degree()).rev() {
            acc *= x;
            acc += &self.coeffs[i];
        }
        acc
    }

    /// Determinant of the evaluation at `x`.
    pub fn det_at(&self, x: f64) -> f64 {
        self.eval(x).determinant()
    }

    /// The Gram square `self^T * self`: the degree-`2d` polynomial with
    /// coefficient of `x^k` equal to `sum_{i+j=k} C_i^T C_j`.
    ///
    /// The result is symmetric; coefficients are symmetrized exactly to
    /// remove floating-point asymmetry from the summation order.
    pub fn gram(&self) -> MatPoly {
        let d = self.degree();
        let mut out = vec![DMatrix::<f64>::zeros(self.dim, self.dim); 2 * d + 1];
        for (i, ci) in self.coeffs.iter().enumerate() {
            let ci_t = ci.transpose();
            for (j, cj) in self.coeffs.iter().enumerate() {
                out[i + j] += &ci_t * cj;
            }
        }
        MatPoly {
            dim: self.dim,
            coeffs: out.iter().map(linalg::symmetric_part).collect(),
        }
    }

    /// Degree reversal: coefficient `i` of the output is coefficient
    /// `d - i` of the input.
    pub fn reverse(&self) -> MatPoly {
        let mut coeffs = self.coeffs.clone();
        coeffs.reverse();
        MatPoly {
            dim: self.dim,
            coeffs,
        }
    }

    /// The substitution `x -> x0 - x`: returns `q` with `q(x) = p(x0 - x)`.
    pub fn shift_reflect(&self, x0: f64) -> MatPoly {
        self.substitute_affine(x0, -1.0)
    }

    /// The substitution `x -> x + x0`: returns `q` with `q(x) = p(x + x0)`.
    pub fn shift(&self, x0: f64) -> MatPoly {
        self.substitute_affine(x0, 1.0)
    }

    /// `q(x) = p(a + b x)` by binomial expansion of `(a + b x)^j`. Degrees up
    /// to 16 keep every binomial coefficient exactly representable.
    fn substitute_affine(&self, a: f64, b: f64) -> MatPoly {
        let d = self.degree();
        let binom = pascal_triangle(d);
        let mut out = vec![DMatrix::<f64>::zeros(self.dim, self.dim); d + 1];
        for (j, cj) in self.coeffs.iter().enumerate() {
            // (a + b x)^j = sum_k binom(j, k) a^(j-k) b^k x^k
            let mut a_pow = 1.0;
            for k in (0..=j).rev() {
                out[k] += cj * (binom[j][k] * a_pow * b.powi(k as i32));
                a_pow *= a;
            }
        }
        MatPoly {
            dim: self.dim,
            coeffs: out,
        }
    }

    /// Sampled positivity check: true iff the smallest eigenvalue of the
    /// (symmetrized) evaluation is `>= -tol` at every grid point.
    ///
    /// This is a necessary condition only; positive semidefiniteness between
    /// grid points is not certified.
    pub fn psd_on_grid(&self, grid: &[f64], tol: f64) -> bool {
        grid.iter()
            .all(|&x| linalg::min_sym_eigenvalue(&self.eval(x)) >= -tol)
    }

    /// Largest absolute entry of the coefficient-wise difference. Degrees may
    /// differ; missing coefficients count as zero.
    pub fn max_coeff_diff(&self, other: &MatPoly) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut worst = 0.0f64;
        for i in 0..=self.degree().max(other.degree()) {
            let diff = match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => linalg::max_abs(&(a - b)),
                (Some(a), None) => linalg::max_abs(a),
                (None, Some(b)) => linalg::max_abs(b),
                (None, None) => 0.0,
            };
            worst = worst.max(diff);
        }
        worst
    }

    /// New polynomial with every coefficient right-multiplied by `w`.
    pub fn right_mul(&self, w: &DMatrix<f64>) -> MatPoly {
        MatPoly {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * w).collect(),
        }
    }

    /// New polynomial with every coefficient congruence-transformed to
    /// `w^T C w` (for symmetric `w` this is `w C w`).
    pub fn congruence(&self, w: &DMatrix<f64>) -> MatPoly {
        let wt = w.transpose();
        MatPoly {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| &wt * c * w).collect(),
        }
    }
}

/// Rows 0..=d of Pascal's triangle in floating point.
fn pascal_triangle(d: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![vec![1.0]];
    for j in 1..=d {
        let prev = &rows[j - 1];
        let mut row = vec![1.0; j + 1];
        for k in 1..j {
            row[k] = prev[k - 1] + prev[k];
        }
        rows.push(row);
    }
    rows
}
