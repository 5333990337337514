//! Real factorization of positive semidefinite matrix polynomials.
//!
//! Given a real symmetric matrix polynomial `Q(x)` of even degree `2m` that is
//! positive semidefinite for every real `x` and whose determinant has only
//! roots of even multiplicity, this crate computes a real matrix polynomial
//! `G(x)` of degree `m` with
//!
//! ```text
//! Q(x) = G(x)^T G(x).
//! ```
//!
//! The factorization is obtained by solving a modified algebraic Riccati
//! equation `XSX - XR + R^T X + P = 0` for a skew-symmetric `X`. The solution
//! is constructed from an invariant, neutral subspace of a structured
//! linearization of the reversed polynomial, read off the real Jordan data of
//! that linearization.
//!
//! Module layout:
//!
//! - [`matpoly`] — dense matrix polynomials and their arithmetic,
//! - [`riccati`] — the structured matrices of the modified Riccati equation
//!   and the predicates (graph subspace, neutrality, controllability) that
//!   certify solutions,
//! - [`eigenstructure`] — eigenvalue clustering, real Jordan data, and the
//!   column-selection rules that produce the neutral subspace,
//! - [`factorizer`] — the end-to-end pipeline from `Q` to `G`,
//! - [`sampling`] — seeded random instances for trials and benchmarks.

pub mod eigenstructure;
pub mod factorizer;
pub mod linalg;
pub mod matpoly;
pub mod riccati;
pub mod sampling;

#[cfg(test)]
pub(crate) mod testdata;

pub use eigenstructure::{
    JordanBlockDesc, JordanBlockKind, NeutralSubspace, RealJordanData, SpectrumCluster,
    SpectrumVerdict,
};
pub use factorizer::{
    factorize, FactorizationOptions, FactorizationReport, FactorizeError, JordanSource,
    Tolerances, X0Mode,
};
pub use matpoly::{MatPoly, MatPolyError};
pub use riccati::{RiccatiData, StructuredPencil};
