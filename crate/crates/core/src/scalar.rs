//! Scalar abstractions.
//!
//! Dense numerics (matrix exponentials, eigenvalues, polar coordinates) are
//! written against [`Real`], which `f32` and `f64` implement. The closed-form
//! dimension formulas only need ordered field arithmetic and are written
//! against [`OrderedField`], which additionally admits exact rationals such as
//! `num_rational::Ratio<i128>`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Floating point scalar used by the numerical layers: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field arithmetic sufficient for the dimension formulas.
pub trait OrderedField: Num + Clone + PartialOrd + FromPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable")
    }
}

impl<T> OrderedField for T where T: Num + Clone + PartialOrd + FromPrimitive + Debug {}
