//! Numerical checks of the two integral bounds used for the lower bounds on
//! the dimensions:
//!
//! `I(A) = ∫_0^2 (A + r^h)^{−p} r^{n−1} dr ≤ C (A^{−p+n/δ} + C')`
//!
//! `J(A,B) = ∫_0^2 r^{n−1} (A + r^α)^{−β} (B + r)^{−η} dr`, bounded in three
//! regimes of `αβ` versus `n`, for `A^{1/α} ≤ B`.
//!
//! A bound is accepted when the ratio of the integral to the bounding
//! function has a finite supremum on a log grid that does not grow by more
//! than [`GROWTH_ALLOWANCE`] when the grid is doubled in density and extended
//! one decade further toward the singular corner.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::stats::ols;

pub const GROWTH_ALLOWANCE: f64 = 1.25;
const REL_TOL: f64 = 1e-9;
const GRID_PER_DECADE: usize = 4;
const SMALLEST_EXPONENT: i32 = -6;

#[derive(Debug, Clone, Serialize)]
pub struct IntegralIReport {
    /// Log–log slope of `I(A)` over the two smallest decades of `A`.
    pub fitted_exponent: f64,
    /// `−p + n/h` when `p > n/h`, else `0`.
    pub asymptotic_exponent: f64,
    /// Exponent of the bound, `−p + n/δ`.
    pub bound_exponent: f64,
    pub c: f64,
    pub c_prime: f64,
    pub sup_ratio: f64,
    pub refined_sup_ratio: f64,
    pub bound_ok: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JRegime {
    /// `αβ > n`: `J ≤ C A^{n/α−β} B^{−η}`.
    Above,
    /// `αβ = n`: `J ≤ C B^{−η} log(1 + B^n A^{−n/α})`.
    Critical,
    /// `αβ < n`: `J ≤ C max(1, B^{n−αβ−η})`.
    Below,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralJReport {
    pub regime: JRegime,
    pub sup_ratio: f64,
    pub refined_sup_ratio: f64,
    pub bound_ok: bool,
}

/// Points `10^e` for `e` on a uniform grid over `[lo, hi]` with
/// `per_decade` points per decade.
fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let steps = (((hi - lo) * per_decade as f64).round() as usize).max(1);
    (0..=steps)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / steps as f64))
        .collect()
}

fn breakpoints(scale: f64) -> Vec<f64> {
    [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2]
        .iter()
        .map(|f| f * scale)
        .filter(|&b| b > 0.0 && b < 2.0)
        .collect()
}

/// `I(A)` by adaptive quadrature.
pub fn integral_i(a: f64, h: f64, p: f64, n: u32) -> Result<f64> {
    let f = |r: f64| (a + r.powf(h)).powf(-p) * r.powi(n as i32 - 1);
    integrate(f, 0.0, 2.0, &breakpoints(a.powf(1.0 / h)), REL_TOL)
}

/// `J(A, B)` by adaptive quadrature.
pub fn integral_j(a: f64, b: f64, alpha: f64, beta: f64, eta: f64, n: u32) -> Result<f64> {
    let f = |r: f64| r.powi(n as i32 - 1) / ((a + r.powf(alpha)).powf(beta) * (b + r).powf(eta));
    let mut bp = breakpoints(a.powf(1.0 / alpha));
    bp.extend(breakpoints(b));
    bp.sort_by(f64::total_cmp);
    bp.dedup();
    integrate(f, 0.0, 2.0, &bp, REL_TOL)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Validation(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Checks the `I(A)` bound for `A ∈ [1e-6, M]`.
pub fn verify_integral_i(h: f64, delta: f64, p: f64, m: f64, n: u32) -> Result<IntegralIReport> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::Validation(format!("h must lie in (0, 1), got {h}")));
    }
    if !(delta > h) {
        return Err(Error::Validation(format!("delta must exceed h, got {delta} <= {h}")));
    }
    check_positive("p", p)?;
    check_positive("M", m)?;
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let top = m.log10();
    let lo = SMALLEST_EXPONENT as f64;
    if top <= lo + 2.0 {
        return Err(Error::Validation(format!("M = {m} leaves too short a range above 1e-6")));
    }
    let bound_exp = -p + n as f64 / delta;
    let c_prime = 1.0;
    let bound = |a: f64| a.powf(bound_exp) + c_prime;

    let sup = |grid: &[f64]| -> Result<(f64, Vec<f64>)> {
        let mut worst: f64 = 0.0;
        let mut values = Vec::with_capacity(grid.len());
        for &a in grid {
            let v = integral_i(a, h, p, n)?;
            worst = worst.max(v / bound(a));
            values.push(v);
        }
        Ok((worst, values))
    };
    let grid = log_grid(lo, top, GRID_PER_DECADE);
    let (sup_ratio, values) = sup(&grid)?;
    let (refined, _) = sup(&log_grid(lo - 1.0, top, 2 * GRID_PER_DECADE))?;

    let tail = 2 * GRID_PER_DECADE + 1;
    let lx: Vec<f64> = grid[..tail].iter().map(|a| a.ln()).collect();
    let ly: Vec<f64> = values[..tail].iter().map(|v| v.ln()).collect();
    let fit = ols(&lx, &ly).ok_or_else(|| Error::numeric("degenerate slope fit", 0.0))?;

    let asymptotic = if p > n as f64 / h { -p + n as f64 / h } else { 0.0 };
    Ok(IntegralIReport {
        fitted_exponent: fit.slope,
        asymptotic_exponent: asymptotic,
        bound_exponent: bound_exp,
        c: sup_ratio,
        c_prime,
        sup_ratio,
        refined_sup_ratio: refined,
        bound_ok: sup_ratio.is_finite() && refined <= GROWTH_ALLOWANCE * sup_ratio,
    })
}

/// Checks the `J(A, B)` bound in the regime selected by `αβ` versus `n`, on
/// `B ∈ [1e-6, 1]` and `A = t·B^α` with `t ∈ [1e-6, 1]`.
pub fn verify_integral_j(alpha: f64, beta: f64, eta: f64, n: u32) -> Result<IntegralJReport> {
    check_positive("alpha", alpha)?;
    check_positive("beta", beta)?;
    check_positive("eta", eta)?;
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let nf = n as f64;
    let ab = alpha * beta;
    let scale = 1e-12 * nf.max(ab);
    let regime = if (ab - nf).abs() <= scale {
        JRegime::Critical
    } else if ab > nf {
        JRegime::Above
    } else {
        if (ab + eta - nf).abs() <= scale {
            return Err(Error::Validation(format!(
                "alpha*beta + eta = n is excluded (alpha={alpha}, beta={beta}, eta={eta}, n={n})"
            )));
        }
        JRegime::Below
    };
    let bound = |a: f64, b: f64| -> f64 {
        match regime {
            JRegime::Above => a.powf(nf / alpha - beta) * b.powf(-eta),
            JRegime::Critical => b.powf(-eta) * (1.0 + b.powf(nf) * a.powf(-nf / alpha)).ln(),
            JRegime::Below => b.powf(nf - ab - eta).max(1.0),
        }
    };
    let sup = |lo: f64, per_decade: usize| -> Result<f64> {
        let bs = log_grid(lo, 0.0, per_decade);
        let ts = log_grid(lo, 0.0, per_decade);
        let mut worst: f64 = 0.0;
        for &b in &bs {
            for &t in &ts {
                let a = t * b.powf(alpha);
                if a <= f64::MIN_POSITIVE {
                    continue;
                }
                let v = integral_j(a, b, alpha, beta, eta, n)?;
                worst = worst.max(v / bound(a, b));
            }
        }
        Ok(worst)
    };
    let lo = SMALLEST_EXPONENT as f64;
    let sup_ratio = sup(lo, GRID_PER_DECADE / 2)?;
    let refined = sup(lo - 1.0, GRID_PER_DECADE)?;
    Ok(IntegralJReport {
        regime,
        sup_ratio,
        refined_sup_ratio: refined,
        bound_ok: sup_ratio.is_finite() && refined <= GROWTH_ALLOWANCE * sup_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn i_closed_form_at_zero() {
        // With A → 0, I = ∫_0^2 r^{-hp+n-1} dr = 2^{n-hp}/(n-hp).
        let v = integral_i(1e-300, 0.5, 1.0, 1).unwrap();
        let exact = 2f64.powf(0.5) / 0.5;
        assert!((v - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn i_integrable_case_has_flat_slope() {
        let r = verify_integral_i(0.5, 0.6, 1.0, 1.0, 1).unwrap();
        assert!(r.fitted_exponent.abs() < 0.05, "{r:?}");
        assert!(r.bound_ok);
    }

    #[test]
    fn i_examples() {
        let r = verify_integral_i(0.5, 0.6, 2.0, 1.0, 1).unwrap();
        assert!(r.bound_ok, "{r:?}");
        let r = verify_integral_i(0.5, 0.6, 5.0 / 3.0, 1.0, 1).unwrap();
        assert!(r.bound_ok, "{r:?}");
        let r = verify_integral_i(0.5, 0.6, 3.0, 1.0, 1).unwrap();
        assert!(r.bound_ok, "{r:?}");
        assert!((r.fitted_exponent - r.asymptotic_exponent).abs() < 0.05, "{r:?}");
    }

    #[test]
    fn i_rejects_bad_parameters() {
        assert!(verify_integral_i(1.5, 2.0, 1.0, 1.0, 1).is_err());
        assert!(verify_integral_i(0.5, 0.4, 1.0, 1.0, 1).is_err());
    }

    #[test]
    fn j_regimes() {
        let r = verify_integral_j(2.0, 1.0, 0.5, 1).unwrap();
        assert_eq!(r.regime, JRegime::Above);
        assert!(r.bound_ok, "{r:?}");
        let r = verify_integral_j(1.0, 1.0, 0.5, 1).unwrap();
        assert_eq!(r.regime, JRegime::Critical);
        assert!(r.bound_ok, "{r:?}");
        let r = verify_integral_j(1.0, 0.5, 0.4, 1).unwrap();
        assert_eq!(r.regime, JRegime::Below);
        assert!(r.bound_ok, "{r:?}");
    }

    #[test]
    fn j_excluded_equality() {
        assert!(verify_integral_j(1.0, 0.5, 0.5, 1).is_err());
    }

    #[test]
    fn a_wrong_bound_is_detected() {
        // For αβ > n the integral really grows like A^{n/α−β}; a bound that
        // only allows B^{−η} growth must fail.
        let grid = log_grid(-6.0, 0.0, 2);
        let small = grid[0];
        let v = integral_j(small * small, small, 2.0, 1.0, 0.5, 1).unwrap();
        let w = integral_j(1e-2 * small * small, small, 2.0, 1.0, 0.5, 1).unwrap();
        assert!(w / v > 5.0);
    }
}
