use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::ScalingPair;
use crate::matcalc::{matrix_power, Matrix};
use crate::synthesis::{HarmonizableField, MovingAverageField};

pub const MIN_REALIZATIONS: u64 = 10_000;

/// A synthesizer able to draw many realizations at a few points.
#[derive(Clone, Copy)]
pub enum Synthesizer<'a> {
    Harmonizable(&'a HarmonizableField),
    /// Points must be nodes of the field's grid.
    MovingAverage(&'a MovingAverageField),
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalingComparison {
    pub x: Vec<f64>,
    pub c: f64,
    pub relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CovarianceScalingReport {
    pub realizations: u64,
    pub max_relative_error: f64,
    pub comparisons: Vec<ScalingComparison>,
}

/// Compares the sample covariance at `c^E x` with `c^D Cov[X(x)] c^{D*}` for
/// every base point and every `c`, using `n` realizations with seeds
/// `seed0..seed0+n`. Both exponents are the pair's normalized ones, so the
/// comparison holds exactly for the synthesized law.
pub fn covariance_scaling_check(
    pair: &ScalingPair<f64>,
    synth: Synthesizer<'_>,
    base_points: &[Vec<f64>],
    cs: &[f64],
    n: u64,
    seed0: u64,
) -> Result<CovarianceScalingReport> {
    if n < MIN_REALIZATIONS {
        return Err(Error::Validation(format!(
            "covariance scaling needs at least {MIN_REALIZATIONS} realizations, got {n}"
        )));
    }
    if cs.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::Validation("scaling factors must be positive".into()));
    }
    let d = pair.dim_domain();
    let m = pair.dim_values();
    if base_points.iter().any(|x| x.len() != d) {
        return Err(Error::Dimension(format!("base points must have {d} coordinates")));
    }
    // Layout: base points first, then the scaled copies for each c.
    let mut points: Vec<Vec<f64>> = base_points.to_vec();
    let mut scalings = Vec::new();
    for &c in cs {
        let ce = matrix_power(pair.e(), c)?;
        let cd = matrix_power(pair.d(), c)?;
        for x in base_points {
            points.push(ce.matvec(x));
        }
        scalings.push(cd);
    }
    let samples = draw(synth, &points, seed0..seed0 + n)?;
    let covs = sample_covariances(&samples, points.len(), m);

    let k = base_points.len();
    let mut comparisons = Vec::new();
    for (ci, (&c, cd)) in cs.iter().zip(&scalings).enumerate() {
        for (b, x) in base_points.iter().enumerate() {
            let predicted = &(cd * &covs[b]) * &cd.transpose();
            let observed = &covs[k * (ci + 1) + b];
            let relative_error = (observed - &predicted).norm_fro() / predicted.norm_fro();
            comparisons.push(ScalingComparison { x: x.clone(), c, relative_error });
        }
    }
    let max_relative_error = comparisons
        .iter()
        .map(|c| c.relative_error)
        .fold(0.0, f64::max);
    if !max_relative_error.is_finite() {
        return Err(Error::numeric("covariance comparison is not finite", max_relative_error));
    }
    Ok(CovarianceScalingReport { realizations: n, max_relative_error, comparisons })
}

fn draw(synth: Synthesizer<'_>, points: &[Vec<f64>], seeds: std::ops::Range<u64>) -> Result<Vec<Vec<f64>>> {
    match synth {
        Synthesizer::Harmonizable(f) => f.sample_points(points, seeds),
        Synthesizer::MovingAverage(f) => {
            let grid = f.grid();
            let nodes = points
                .iter()
                .map(|p| node_of(grid, p))
                .collect::<Result<Vec<_>>>()?;
            f.sample_nodes(&nodes, seeds)
        }
    }
}

fn node_of(grid: &crate::synthesis::GridSpec, p: &[f64]) -> Result<usize> {
    let mut idx = Vec::with_capacity(p.len());
    for (a, &v) in p.iter().enumerate() {
        let i = v / grid.spacing(a);
        let r = i.round();
        if (i - r).abs() > 1e-9 || r < 0.0 || r as usize >= grid.points_per_axis[a] {
            return Err(Error::Validation(format!(
                "point {p:?} is not a node of the moving-average grid"
            )));
        }
        idx.push(r as usize);
    }
    Ok(grid.flat_index(&idx))
}

/// Centered sample covariance per point; samples are point-major with `m`
/// values per point. Per-seed contributions are summed in seed order.
fn sample_covariances(samples: &[Vec<f64>], points: usize, m: usize) -> Vec<Matrix<f64>> {
    let n = samples.len() as f64;
    (0..points)
        .into_par_iter()
        .map(|p| {
            let mut mean = vec![0.0; m];
            for s in samples {
                for i in 0..m {
                    mean[i] += s[p * m + i];
                }
            }
            mean.iter_mut().for_each(|v| *v /= n);
            let mut cov = vec![0.0; m * m];
            for s in samples {
                for i in 0..m {
                    for j in 0..m {
                        cov[i * m + j] += (s[p * m + i] - mean[i]) * (s[p * m + j] - mean[j]);
                    }
                }
            }
            Matrix::new(m, m, cov.into_iter().map(|v| v / (n - 1.0)).collect())
                .expect("square covariance")
        })
        .collect()
}
