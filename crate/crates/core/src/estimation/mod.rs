//! Empirical estimators: box-counting dimensions, variogram exponents and the
//! covariance-scaling check.

mod boxcount;
mod covariance;
mod holder;

pub use boxcount::{
    box_count, graph_dimension_estimate, range_dimension_estimate, BoxCountCurve, BoxCountFit,
    MIN_OCCUPANCY, MIN_POINTS, MIN_SCALES,
};
pub use covariance::{
    covariance_scaling_check, CovarianceScalingReport, ScalingComparison, Synthesizer,
    MIN_REALIZATIONS,
};
pub use holder::{
    component_exponent, holder_exponent, real_eigenprojectors, HolderReport, LagClass,
    MIN_LAG_CLASSES, MIN_NODES, SUP_RATIO_EPSILON,
};
