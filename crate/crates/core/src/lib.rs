//! Operator-self-similar Gaussian random fields.
//!
//! The crate computes closed-form Hausdorff dimensions of the range and graph
//! of `(E, D)`-operator-self-similar Gaussian fields over the unit cube,
//! synthesises such fields from their harmonizable and moving-average
//! representations, and checks the theory against box-counting, variogram and
//! covariance-scaling estimators.
//!
//! Numerical layers are generic over [`Real`] (`f32`/`f64`); the dimension
//! formulas are generic over [`OrderedField`] and also run in exact
//! rationals. The aliases below fix the common concrete choices.

pub mod anisotropy;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod exponents;
pub mod matcalc;
pub mod quadrature;
pub mod scalar;
pub mod stats;
pub mod synthesis;

pub use error::{Error, Result};
pub use scalar::{OrderedField, Real};

/// Double precision matrix.
pub type Matrix64 = matcalc::Matrix<f64>;
/// Single precision matrix.
pub type Matrix32 = matcalc::Matrix<f32>;
/// Exact rational scalar used by the formula cross-checks.
pub type Rational = num_rational::Ratio<i128>;
