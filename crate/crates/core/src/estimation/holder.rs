use serde::Serialize;

use crate::anisotropy::SpectralDecomposition;
use crate::error::{Error, Result};
use crate::exponents::ScalingPair;
use crate::matcalc::{eigenvalues, Matrix};
use crate::stats::ols_grouped;
use crate::synthesis::FieldSample;

/// Slack subtracted from the exponent in the sup-ratio statistic.
pub const SUP_RATIO_EPSILON: f64 = 0.05;
pub const MIN_NODES: usize = 1 << 10;
pub const MIN_LAG_CLASSES: usize = 4;

#[derive(Debug, Clone, Serialize)]
pub struct LagClass {
    pub axis: usize,
    /// Lag in grid steps.
    pub steps: usize,
    pub lag: f64,
    pub tau: f64,
    /// Root mean square increment.
    pub moment: f64,
    pub pairs: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub component: usize,
    pub fitted_exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// Exponent the theory assigns to this component, in the units of the
    /// supplied decomposition.
    pub expected_exponent: f64,
    /// `max |X_j(x) − X_j(y)| / τ_E(x − y)^{λ_j − ε}` over all lag pairs.
    pub max_ratio: f64,
    pub lags: Vec<LagClass>,
}

/// Projectors onto the eigenspaces of a real-diagonalizable `d`, with their
/// eigenvalues, by Lagrange interpolation. Refuses complex spectra and
/// nontrivial Jordan blocks.
pub fn real_eigenprojectors(d: &Matrix<f64>, tol: f64) -> Result<Vec<(f64, Matrix<f64>)>> {
    let n = d.rows();
    let scale = d.max_abs().max(1.0);
    let eig = eigenvalues(d)?;
    if eig.iter().any(|&(_, im)| im.abs() > 1e-6 * scale) {
        return Err(Error::Validation(
            "D has complex eigenvalues; component exponents are not defined".into(),
        ));
    }
    let mut re: Vec<f64> = eig.iter().map(|&(r, _)| r).collect();
    re.sort_by(|a, b| a.total_cmp(b));
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for r in re {
        match groups.last_mut() {
            Some(g) if (r - g[0]).abs() <= 1e-6 * scale => g.push(r),
            _ => groups.push(vec![r]),
        }
    }
    let values: Vec<f64> = groups
        .iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect();
    let mut minimal = Matrix::identity(n);
    for &v in &values {
        minimal = &minimal * &d.shift(-v);
    }
    if minimal.max_abs() > tol * scale.powi(values.len() as i32) {
        return Err(Error::Validation(
            "D is not diagonalizable over the reals; Jordan blocks mix log factors into the exponents"
                .into(),
        ));
    }
    Ok(values
        .iter()
        .enumerate()
        .map(|(g, &v)| {
            let mut p = Matrix::identity(n);
            for (h, &w) in values.iter().enumerate() {
                if h != g {
                    p = (&p * &d.shift(-w)).scale(1.0 / (v - w));
                }
            }
            (v, p)
        })
        .collect())
}

/// Smallest eigenvalue whose eigenspace projector has a nonzero row `j`:
/// the exponent governing coordinate `j` of the field.
pub fn component_exponent(d: &Matrix<f64>, j: usize) -> Result<f64> {
    if j >= d.rows() {
        return Err(Error::Validation(format!(
            "component {j} out of range for m = {}",
            d.rows()
        )));
    }
    let projectors = real_eigenprojectors(d, 1e-8)?;
    projectors
        .iter()
        .find(|(_, p)| p.row(j).iter().any(|v| v.abs() > 1e-10))
        .map(|(v, _)| *v)
        .ok_or_else(|| Error::numeric("component has no eigenspace weight", 0.0))
}

/// Variogram regression for component `j` (0-based) of `field`, with one
/// common slope and a separate intercept per axis.
///
/// Lag classes are `2^k` grid steps along each axis, up to 1/64 of the axis
/// (at least 8 steps when the axis has 33 or more nodes). Longer lags average
/// over too few independent increments and bias the log moments low. The fitted slope of `log RMS increment` against `log τ` estimates the
/// component exponent in the units of `decomp`, which must be generated by a
/// positive multiple `s·E` of the pair's normalized exponent; the expected
/// value is then `s·λ_j`.
pub fn holder_exponent(
    field: &FieldSample,
    pair: &ScalingPair<f64>,
    decomp: &SpectralDecomposition<f64>,
    j: usize,
) -> Result<HolderReport> {
    let grid = &field.grid;
    if grid.len() < MIN_NODES {
        return Err(Error::Validation(format!(
            "Hölder regression needs at least {MIN_NODES} nodes, got {}",
            grid.len()
        )));
    }
    if grid.d() != pair.dim_domain() || field.m != pair.dim_values() || decomp.dim() != grid.d() {
        return Err(Error::Dimension("field, pair and decomposition disagree in shape".into()));
    }
    let s = generator_multiple(decomp.generator(), pair.e())?;
    let expected = s * component_exponent(pair.d(), j)?;

    let d = grid.d();
    let m = field.m;
    let mut lags = Vec::new();
    let mut max_ratio: f64 = 0.0;
    for axis in 0..d {
        let n = grid.points_per_axis[axis];
        let max_steps = ((n - 1) / 64).max(8.min((n - 1) / 4));
        let mut steps = 1;
        while steps <= max_steps {
            let mut h = vec![0.0; d];
            h[axis] = steps as f64 * grid.spacing(axis);
            let tau = decomp.tau(&h)?;
            let weight = tau.powf(expected - SUP_RATIO_EPSILON);
            let mut sum = 0.0;
            let mut pairs = 0;
            for node in 0..grid.len() {
                let mut idx = grid.multi_index(node);
                if idx[axis] + steps >= n {
                    continue;
                }
                idx[axis] += steps;
                let other = grid.flat_index(&idx);
                let inc = field.values[other * m + j] - field.values[node * m + j];
                sum += inc * inc;
                pairs += 1;
                max_ratio = max_ratio.max(inc.abs() / weight);
            }
            lags.push(LagClass {
                axis,
                steps,
                lag: h[axis],
                tau,
                moment: (sum / pairs as f64).sqrt(),
                pairs,
            });
            steps *= 2;
        }
    }
    if lags.len() < MIN_LAG_CLASSES {
        return Err(Error::Validation(format!(
            "only {} lag classes, need {MIN_LAG_CLASSES}",
            lags.len()
        )));
    }
    // The increment law scales with τ but its constant depends on direction,
    // so each axis keeps its own intercept.
    let axes: Vec<usize> = lags.iter().map(|l| l.axis).collect();
    let x: Vec<f64> = lags.iter().map(|l| l.tau.ln()).collect();
    let y: Vec<f64> = lags.iter().map(|l| l.moment.ln()).collect();
    let fit = ols_grouped(&axes, &x, &y)
        .ok_or_else(|| Error::numeric("degenerate variogram regression", f64::NAN))?;
    if !(fit.slope > 0.0) {
        return Err(Error::numeric("variogram slope is not positive", fit.slope));
    }
    Ok(HolderReport {
        component: j,
        fitted_exponent: fit.slope,
        stderr: fit.stderr,
        r_squared: fit.r_squared,
        expected_exponent: expected,
        max_ratio,
        lags,
    })
}

fn generator_multiple(g: &Matrix<f64>, e: &Matrix<f64>) -> Result<f64> {
    let s = g.trace() / e.trace();
    let diff = (g - &e.scale(s)).max_abs();
    if !(s > 0.0) || diff > 1e-9 * g.max_abs().max(1.0) {
        return Err(Error::Validation(
            "decomposition generator is not a positive multiple of the pair's E".into(),
        ));
    }
    Ok(s)
}
