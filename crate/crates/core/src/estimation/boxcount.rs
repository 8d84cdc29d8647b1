use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::ols;
use crate::synthesis::FieldSample;

pub const MIN_POINTS: usize = 1000;
pub const MIN_SCALES: usize = 4;
/// Finest scale kept: at least this many points per occupied box on average.
pub const MIN_OCCUPANCY: f64 = 4.0;
const MAX_LEVEL: u32 = 30;

#[derive(Debug, Clone, Serialize)]
pub struct BoxCountFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub r_squared: f64,
    /// Inclusive index range into `scales`.
    pub window: (usize, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxCountCurve {
    /// Box sizes `2^{−k}`, decreasing.
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub fit: BoxCountFit,
}

/// Occupied-box counts of `points` (each of length `n`) after a uniform
/// rescaling into the unit cube, at dyadic sizes `2^{−k}` for `k = 2, 3, …`
/// while the mean occupancy stays at least [`MIN_OCCUPANCY`]. The slope of
/// `log N` against `log(1/ε)` is fitted on the contiguous window of at least
/// [`MIN_SCALES`] scales with the largest `R²`.
pub fn box_count(points: &[Vec<f64>]) -> Result<BoxCountCurve> {
    if points.len() < MIN_POINTS {
        return Err(Error::Validation(format!(
            "box counting needs at least {MIN_POINTS} points, got {}",
            points.len()
        )));
    }
    let n = points[0].len();
    if n == 0 || points.iter().any(|p| p.len() != n) {
        return Err(Error::Dimension("points must share one positive dimension".into()));
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Validation("points must be finite".into()));
    }
    let lo: Vec<f64> = (0..n)
        .map(|a| points.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min))
        .collect();
    let span = (0..n)
        .map(|a| points.iter().map(|p| p[a] - lo[a]).fold(0.0, f64::max))
        .fold(0.0, f64::max);
    if !(span > 0.0) {
        return Err(Error::Validation("all points coincide".into()));
    }
    let unit: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().zip(&lo).map(|(v, l)| (v - l) / span).collect())
        .collect();

    // Counts grow by at most 2^n per level, so the occupancy cut is found
    // one batch of levels at a time without counting far past it.
    let mut scales = Vec::new();
    let mut counts = Vec::new();
    let mut k = 2;
    'levels: while k <= MAX_LEVEL {
        let batch: Vec<u32> = (k..(k + 4).min(MAX_LEVEL + 1)).collect();
        let found: Vec<usize> = batch.par_iter().map(|&l| occupied(&unit, l)).collect();
        for (&l, c) in batch.iter().zip(found) {
            if (points.len() as f64) / (c as f64) < MIN_OCCUPANCY {
                break 'levels;
            }
            scales.push(2f64.powi(-(l as i32)));
            counts.push(c);
        }
        k += batch.len() as u32;
    }
    if scales.len() < MIN_SCALES {
        return Err(Error::Validation(format!(
            "only {} usable box sizes, need {MIN_SCALES}; supply more points",
            scales.len()
        )));
    }
    let fit = best_window(&scales, &counts)?;
    Ok(BoxCountCurve { scales, counts, fit })
}

fn occupied(unit: &[Vec<f64>], k: u32) -> usize {
    let cells = (1u64 << k) as f64;
    let top = (1u64 << k) - 1;
    let mut keys: Vec<Vec<u32>> = unit
        .iter()
        .map(|p| {
            p.iter()
                .map(|&v| ((v * cells) as u64).min(top) as u32)
                .collect()
        })
        .collect();
    keys.sort_unstable();
    keys.dedup();
    keys.len()
}

fn best_window(scales: &[f64], counts: &[usize]) -> Result<BoxCountFit> {
    let x: Vec<f64> = scales.iter().map(|s| (1.0 / s).ln()).collect();
    let y: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let mut best: Option<BoxCountFit> = None;
    for start in 0..x.len() {
        for end in start + MIN_SCALES - 1..x.len() {
            let Some(f) = ols(&x[start..=end], &y[start..=end]) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    f.r_squared > b.r_squared
                        || (f.r_squared == b.r_squared && end - start > b.window.1 - b.window.0)
                }
            };
            if better {
                best = Some(BoxCountFit {
                    slope: f.slope,
                    intercept: f.intercept,
                    stderr: f.stderr,
                    r_squared: f.r_squared,
                    window: (start, end),
                });
            }
        }
    }
    best.ok_or_else(|| Error::Validation("no box-count window could be fitted".into()))
}

/// Box-counting estimate of the graph `{(x, X(x))}` in `R^{d+m}`. The domain
/// block already spans the unit cube; the value block is scaled by its own
/// range.
pub fn graph_dimension_estimate(field: &FieldSample) -> Result<BoxCountCurve> {
    let d = field.grid.d();
    if !(1..=2).contains(&d) {
        return Err(Error::Validation(format!(
            "graph estimates are defined for d = 1 or 2, got d = {d}"
        )));
    }
    let values = normalized_values(field);
    let points: Vec<Vec<f64>> = (0..field.grid.len())
        .map(|i| {
            let mut p = field.grid.point(i);
            p.extend_from_slice(&values[i * field.m..(i + 1) * field.m]);
            p
        })
        .collect();
    box_count(&points)
}

/// Box-counting estimate of the range `{X(x)}` in `R^m`.
pub fn range_dimension_estimate(field: &FieldSample) -> Result<BoxCountCurve> {
    let points: Vec<Vec<f64>> = (0..field.grid.len())
        .map(|i| field.value(i).to_vec())
        .collect();
    box_count(&points)
}

fn normalized_values(field: &FieldSample) -> Vec<f64> {
    let m = field.m;
    let lo: Vec<f64> = (0..m)
        .map(|i| field.values.iter().skip(i).step_by(m).copied().fold(f64::INFINITY, f64::min))
        .collect();
    let span = (0..m)
        .map(|i| {
            field.values.iter().skip(i).step_by(m).map(|v| v - lo[i]).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let span = if span > 0.0 { span } else { 1.0 };
    field
        .values
        .iter()
        .enumerate()
        .map(|(k, v)| (v - lo[k % m]) / span)
        .collect()
}
