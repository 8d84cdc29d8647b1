//! The `(E, D)` pair, closed-form dimensions and the integral bounds.

mod formulas;
mod integrals;
mod pair;

pub use formulas::{
    in_half_open, Candidate, CandidateKind, DimensionReport, GraphCase, RangeCase,
    SpectralProfile, TildeView,
};
pub use integrals::{
    integral_i, integral_j, verify_integral_i, verify_integral_j, IntegralIReport,
    IntegralJReport, JRegime, GROWTH_ALLOWANCE,
};
pub use pair::{validate_and_normalize, Representation, ScalingPair};
