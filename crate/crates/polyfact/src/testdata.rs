//! Shared fixtures for unit tests: the two worked examples with their known
//! intermediate matrices.

use nalgebra::DMatrix;

use crate::matpoly::MatPoly;

/// `Q(x) = I + x [[2,-3],[-3,4]] + x^2 [[2,-4],[-4,8]]` — real-eigenvalue case.
pub fn example_one() -> MatPoly {
    MatPoly::new(vec![
        DMatrix::identity(2, 2),
        DMatrix::from_row_slice(2, 2, &[2.0, -3.0, -3.0, 4.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, -4.0, -4.0, 8.0]),
    ])
    .unwrap()
}

/// `Q(x) = I + x [[2,2],[2,4]] + x^2 [[2,1],[1,13]]` — complex-eigenvalue case.
pub fn example_two() -> MatPoly {
    MatPoly::new(vec![
        DMatrix::identity(2, 2),
        DMatrix::from_row_slice(2, 2, &[2.0, 2.0, 2.0, 4.0]),
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 13.0]),
    ])
    .unwrap()
}

/// Known skew solution of the modified Riccati equation for [`example_one`].
pub fn x_example_one() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, -0.5, 0.5, 0.0])
}

/// Known skew solution for [`example_two`].
pub fn x_example_two() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 2.0, -2.0, 0.0])
}

/// Displayed `F_X` for [`example_one`].
pub fn fx_example_one() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 1.0, -2.0, //
            0.0, 1.0, -1.0, 2.0, //
            1.0, -1.0, 2.0, -4.0, //
            -2.0, 2.0, -4.0, 8.0,
        ],
    )
}

/// Displayed `F_X` for [`example_two`].
pub fn fx_example_two() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 1.0, 3.0, //
            0.0, 1.0, -1.0, 2.0, //
            1.0, -1.0, 2.0, 1.0, //
            3.0, 2.0, 1.0, 13.0,
        ],
    )
}
