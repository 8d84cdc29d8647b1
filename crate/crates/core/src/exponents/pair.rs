use serde::{Deserialize, Serialize};

use super::formulas::{DimensionReport, SpectralProfile};
use crate::error::{Error, Result};
use crate::matcalc::{eigen_real_parts, eigenvalues, EigenStructure, Matrix, DEFAULT_GROUP_TOL};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    MovingAverage,
    Harmonizable,
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Representation::MovingAverage => "moving_average",
            Representation::Harmonizable => "harmonizable",
        })
    }
}

/// A validated `(E, D)` pair, stored both as given and rescaled by `H` so that
/// `0 < λ_1 ≤ … ≤ λ_m < 1 < a_1 < … < a_p`.
#[derive(Debug, Clone)]
pub struct ScalingPair<T: Real> {
    raw_e: Matrix<T>,
    raw_d: Matrix<T>,
    e: Matrix<T>,
    d: Matrix<T>,
    h: T,
    a: EigenStructure<T>,
    lambda: Vec<T>,
    q: T,
    representation: Representation,
}

/// Checks the scaling conditions on `(E, D)` and normalizes by
/// `H = sqrt(λ_m · a_1)`.
pub fn validate_and_normalize<T: Real>(
    e: &Matrix<T>,
    d: &Matrix<T>,
    representation: Representation,
) -> Result<ScalingPair<T>> {
    e.require_square("E")?;
    d.require_square("D")?;
    if !e.is_finite() || !d.is_finite() {
        return Err(Error::Validation("E and D must have finite entries".into()));
    }
    let tol = T::lit(DEFAULT_GROUP_TOL);
    let a = eigen_real_parts(e, tol)?;
    let lam = eigen_real_parts(d, tol)?;
    if a.min() <= T::zero() {
        return Err(Error::Validation(format!(
            "eigenvalue real parts of E must be positive (smallest is {})",
            a.min()
        )));
    }
    if lam.min() <= T::zero() {
        return Err(Error::Validation(format!(
            "eigenvalue real parts of D must be positive (smallest is {})",
            lam.min()
        )));
    }
    let lambda_max = lam.max();
    let a1 = a.min();
    if lambda_max >= a1 {
        return Err(Error::Validation(format!(
            "scaling condition violated: largest real part of D ({lambda_max}) must be below the smallest real part of E ({a1})"
        )));
    }
    let q_raw = e.trace();
    if representation == Representation::MovingAverage {
        let half = q_raw * T::lit(0.5);
        let hit = eigenvalues(d)?
            .into_iter()
            .any(|(re, im)| (re - half).abs() <= T::lit(1e-8) * (T::one() + half) && im.abs() <= T::lit(1e-8));
        if hit {
            return Err(Error::Validation(format!(
                "field not proper: q/2 = {half} is an eigenvalue of D"
            )));
        }
    }

    let h = (lambda_max * a1).sqrt();
    let inv = T::one() / h;
    let groups = a.groups().iter().map(|&(v, k)| (v * inv, k)).collect();
    Ok(ScalingPair {
        raw_e: e.clone(),
        raw_d: d.clone(),
        e: e.scale(inv),
        d: d.scale(inv),
        h,
        a: EigenStructure::new(groups)?,
        lambda: lam.with_multiplicity().into_iter().map(|v| v * inv).collect(),
        q: q_raw * inv,
        representation,
    })
}

impl<T: Real> ScalingPair<T> {
    /// Normalized `E`.
    pub fn e(&self) -> &Matrix<T> {
        &self.e
    }

    /// Normalized `D`.
    pub fn d(&self) -> &Matrix<T> {
        &self.d
    }

    pub fn raw_e(&self) -> &Matrix<T> {
        &self.raw_e
    }

    pub fn raw_d(&self) -> &Matrix<T> {
        &self.raw_d
    }

    pub fn h(&self) -> T {
        self.h
    }

    /// Normalized eigenvalue groups of `E`.
    pub fn a(&self) -> &EigenStructure<T> {
        &self.a
    }

    /// Normalized `λ_1 ≤ … ≤ λ_m`.
    pub fn lambda(&self) -> &[T] {
        &self.lambda
    }

    /// Normalized `q = trace E`.
    pub fn q(&self) -> T {
        self.q
    }

    pub fn dim_domain(&self) -> usize {
        self.e.rows()
    }

    pub fn dim_values(&self) -> usize {
        self.d.rows()
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn profile(&self) -> SpectralProfile<T> {
        SpectralProfile::new(self.a.groups().to_vec(), self.lambda.clone())
    }

    /// Whether `‖Σ a_k dim W_k − trace E‖` is within `1e-8`.
    pub fn trace_consistent(&self) -> bool {
        (self.a.weighted_sum() - self.q).abs() <= T::lit(1e-8) * (T::one() + self.q.abs())
    }

    pub fn dim_range(&self) -> T {
        self.profile().dim_range()
    }

    pub fn dim_graph(&self) -> DimensionReport<T> {
        self.profile().min_form()
    }

    pub fn dim_case_form(&self) -> DimensionReport<T> {
        self.profile().case_form()
    }

    /// Recomputes the dimensions for `(E/h', D/h')` from scratch and compares
    /// them with the current ones to within `1e-12`.
    pub fn rescaling_invariance_check(&self, h_prime: T) -> Result<bool> {
        if !(h_prime > T::zero()) || !h_prime.is_finite() {
            return Err(Error::Domain(format!("rescaling factor must be positive, got {h_prime}")));
        }
        let inv = T::one() / h_prime;
        let other = validate_and_normalize(
            &self.raw_e.scale(inv),
            &self.raw_d.scale(inv),
            self.representation,
        )?;
        let a = self.dim_graph();
        let b = other.dim_graph();
        let tol = T::lit(1e-12);
        Ok((a.range_dim - b.range_dim).abs() <= tol && (a.graph_dim - b.graph_dim).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(e: &[f64], d: &[f64], rep: Representation) -> Result<ScalingPair<f64>> {
        validate_and_normalize(&Matrix::diag(e), &Matrix::diag(d), rep)
    }

    #[test]
    fn scalar_pair_normalization() {
        let p = pair(&[2.0], &[1.0], Representation::Harmonizable).unwrap();
        let s2 = 2f64.sqrt();
        assert!((p.h() - s2).abs() < 1e-15);
        assert!((p.a().groups()[0].0 - s2).abs() < 1e-15);
        assert!((p.lambda()[0] - 1.0 / s2).abs() < 1e-15);
        assert!(p.lambda()[0] < 1.0 && p.a().min() > 1.0);
    }

    #[test]
    fn scaling_condition_is_enforced() {
        let err = pair(&[1.0, 1.0], &[0.5, 1.0], Representation::Harmonizable).unwrap_err();
        assert!(err.to_string().contains("scaling condition violated"));
    }

    #[test]
    fn properness_gate_for_moving_average() {
        let err = pair(&[1.0, 1.0], &[0.5, 0.99999999999], Representation::MovingAverage);
        assert!(err.is_err());
        // q/2 = 1 equals the eigenvalue of D: the kernel is identically 1 and
        // the field vanishes.
        assert!(pair(&[2.0], &[1.0], Representation::MovingAverage).is_err());
        assert!(pair(&[2.0], &[0.7], Representation::MovingAverage).is_ok());
        let err = pair(&[1.6], &[0.8], Representation::MovingAverage).unwrap_err();
        assert!(err.to_string().contains("not proper"));
        assert!(pair(&[1.6], &[0.8], Representation::Harmonizable).is_ok());
    }

    #[test]
    fn anisotropic_trace() {
        let p = pair(&[2.0, 3.0], &[0.5, 0.7], Representation::Harmonizable).unwrap();
        assert!((p.q() * p.h() - 5.0).abs() < 1e-12);
        assert!(p.trace_consistent());
    }

    #[test]
    fn dimension_examples() {
        let p = pair(&[1.0], &[0.5], Representation::Harmonizable).unwrap();
        assert!((p.dim_range() - 1.0).abs() < 1e-12);
        assert!((p.dim_graph().graph_dim - 1.5).abs() < 1e-12);
        let p = pair(&[1.0, 1.0], &[0.5, 0.7], Representation::Harmonizable).unwrap();
        assert!((p.dim_range() - 2.0).abs() < 1e-12);
        assert!((p.dim_graph().graph_dim - 2.8).abs() < 1e-12);
        let p = pair(&[2.0, 3.0], &[0.6], Representation::Harmonizable).unwrap();
        assert!((p.dim_graph().graph_dim - 2.8).abs() < 1e-12);
    }

    #[test]
    fn rescaling_invariance() {
        let p = pair(&[1.0], &[0.5], Representation::Harmonizable).unwrap();
        assert!(p.rescaling_invariance_check(1.0).unwrap());
        assert!(p.rescaling_invariance_check(2.0).unwrap());
        assert!(p.rescaling_invariance_check(0.0).is_err());
    }
}
