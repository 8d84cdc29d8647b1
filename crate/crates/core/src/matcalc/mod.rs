//! Dense small-matrix functional calculus.

mod eigen;
mod expm;
mod linalg;
mod matrix;

pub use eigen::{eigen_real_parts, eigenvalues, EigenStructure, DEFAULT_GROUP_TOL, MAX_DIM};
pub use expm::{expm, matrix_power};
pub use linalg::{cholesky, column_basis, condition_1, det, inverse, solve_linear, Lu, MAX_CONDITION};
pub use matrix::{dot, norm2, Matrix};
