//! Lattice synthesis of the moving-average field
//! `X(x) = ∫ [φ(x−y)^{D−qI/2} − φ(−y)^{D−qI/2}] W(dy)` with `φ = τ_E`.
//!
//! The lattice is a stack of nested boxes `[−R_ℓ, R_ℓ]^d`, `R_ℓ = 2^ℓ R_0`,
//! with cell width `h_ℓ = 2^ℓ h_0` between consecutive boxes. The finest width
//! is `h_0 = Δ / 2^{refine_levels}` for the grid spacing `Δ`, and
//! `R_0 ≥ 2` covers the unit cube with a margin, so every singular point of
//! the kernel (`y = x` for a node `x`, and `y = 0`) sits in the finest layer.
//! Cell centers lie on the lattice `(k + 1/2) h_ℓ`, never on a node, so no
//! kernel is evaluated at its singularity; the singular cell's own mass is
//! the part lost to discretization and shrinks with refinement.
//!
//! Every difference `x − y_c` is a multiple of `h_0/2`, so kernel values are
//! tabulated once on that lattice.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::rng::RngStream;
use super::{Discretization, FieldMeta, FieldSample};
use crate::anisotropy::{decompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::exponents::{Representation, ScalingPair};
use crate::matcalc::{matrix_power, Matrix, DEFAULT_GROUP_TOL};

/// Largest kernel table, in entries of `m × m` matrices times `m²`.
pub const MAX_TABLE: usize = 1 << 26;
/// Largest lattice, in cells.
pub const MAX_CELLS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub t: f64,
    pub refine_levels: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            t: 8.0,
            refine_levels: 3,
        }
    }
}

impl Truncation {
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Validation(format!("truncation T must be positive, got {}", self.t)));
        }
        if self.t < grid.diameter() {
            return Err(Error::Validation(format!(
                "truncation T = {} is smaller than the grid diameter {}",
                self.t,
                grid.diameter()
            )));
        }
        if self.refine_levels > 12 {
            return Err(Error::Validation("refine_levels must be at most 12".into()));
        }
        Ok(())
    }
}

/// Number of cells [`lattice`] would produce, without building them.
fn lattice_size(d: usize, half_units_r0: i64, levels: u32) -> usize {
    // Every level has R_0 cells per axis; outer levels drop the inner box.
    let per_axis = half_units_r0 as usize;
    let full = per_axis.saturating_pow(d as u32);
    let ring = full.saturating_sub((per_axis / 2).saturating_pow(d as u32));
    full.saturating_add(ring.saturating_mul(levels as usize))
}

/// Lattice cell: integer center in units of `h_0/2` and `sqrt(volume)`.
struct Cell {
    center: Vec<i64>,
    root_volume: f64,
}

fn lattice(d: usize, half_units_r0: i64, levels: u32, level0_width: f64) -> Vec<Cell> {
    // Widths and box radii in units of h_0/2: level ℓ cells are 2^{ℓ+1}
    // units wide, box ℓ has radius 2^ℓ R_0.
    let mut cells = Vec::new();
    for level in 0..=levels {
        let width = 2i64 << level;
        let radius = half_units_r0 << level;
        let inner = if level == 0 { 0 } else { half_units_r0 << (level - 1) };
        let per_axis = (2 * radius / width) as usize;
        let root_volume = (level0_width * (1u64 << level) as f64).powf(d as f64 / 2.0);
        let total = per_axis.pow(d as u32);
        for flat in 0..total {
            let mut rest = flat;
            let mut center = vec![0i64; d];
            for a in (0..d).rev() {
                let k = (rest % per_axis) as i64;
                rest /= per_axis;
                center[a] = -radius + k * width + width / 2;
            }
            let inside_inner = level > 0 && center.iter().all(|&c| c.abs() < inner);
            if !inside_inner {
                cells.push(Cell {
                    center,
                    root_volume,
                });
            }
        }
    }
    cells
}

/// The discretized moving-average field for a fixed grid.
pub struct MovingAverageField {
    grid: GridSpec,
    m: usize,
    cells: Vec<Cell>,
    /// Node coordinates in units of `h_0/2`.
    node_units: Vec<Vec<i64>>,
    table: Vec<f64>,
    table_radius: i64,
    meta: FieldMeta,
}

impl MovingAverageField {
    pub fn new(pair: &ScalingPair<f64>, grid: &GridSpec, truncation: Truncation) -> Result<Self> {
        if pair.representation() != Representation::MovingAverage {
            return Err(Error::Validation(
                "moving-average synthesis needs a moving_average pair".into(),
            ));
        }
        truncation.validate(grid)?;
        let d = pair.dim_domain();
        if grid.d() != d {
            return Err(Error::Dimension(format!(
                "grid has {} axes, field domain has {d}",
                grid.d()
            )));
        }
        let m = pair.dim_values();
        let dec = decompose(pair.e(), DEFAULT_GROUP_TOL)?;

        // Every axis step must be a whole number of h_0/2 units.
        let lcm_steps = grid
            .points_per_axis
            .iter()
            .map(|&n| (n - 1) as i64)
            .fold(1i64, |a, b| a / gcd(a, b) * b);
        let unit_per_one = lcm_steps << (truncation.refine_levels + 1);
        let h0 = 2.0 / unit_per_one as f64;
        // R_0: the smallest multiple of 2 h_0 (4 units) that is at least 2.
        let r0_units = (2 * unit_per_one + 3) / 4 * 4;
        let mut levels = 0u32;
        while ((r0_units << levels) as f64) < truncation.t * unit_per_one as f64 {
            levels += 1;
        }

        let node_units: Vec<Vec<i64>> = (0..grid.len())
            .map(|i| {
                grid.multi_index(i)
                    .iter()
                    .zip(&grid.points_per_axis)
                    .map(|(&k, &n)| k as i64 * unit_per_one / (n as i64 - 1))
                    .collect()
            })
            .collect();

        let table_radius = (r0_units << levels) + unit_per_one;
        let side = (2 * table_radius + 1) as usize;
        let entries = side
            .checked_pow(d as u32)
            .and_then(|e| e.checked_mul(m * m))
            .filter(|&e| e <= MAX_TABLE)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "moving-average kernel table of {side}^{d} entries is too large; lower T, refine_levels or the grid size"
                ))
            })?;
        let cell_count = lattice_size(d, r0_units, levels);
        if cell_count > MAX_CELLS {
            return Err(Error::Validation(format!(
                "moving-average lattice of {cell_count} cells is too large; lower T, refine_levels or the grid size"
            )));
        }
        let cells = lattice(d, r0_units, levels, h0);
        let exponent = pair.d().shift(-0.5 * pair.q());
        let table = kernel_table(&dec, &exponent, d, m, table_radius, 0.5 * h0)?;
        debug_assert_eq!(table.len(), entries);

        Ok(MovingAverageField {
            grid: grid.clone(),
            m,
            cells,
            node_units,
            table,
            table_radius,
            meta: FieldMeta::new(pair, 0, Discretization::MovingAverage(truncation)),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn cells(&self) -> usize {
        self.cells.len()
    }

    fn kernel(&self, offset: &[i64]) -> &[f64] {
        let side = 2 * self.table_radius + 1;
        let idx = offset
            .iter()
            .fold(0i64, |acc, &o| acc * side + (o + self.table_radius)) as usize;
        let mm = self.m * self.m;
        &self.table[idx * mm..(idx + 1) * mm]
    }

    /// `Σ_c φ(x − y_c)^{D−qI/2} g_c` for a point `x` in lattice units.
    fn convolve(&self, x: &[i64], noise: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut out = vec![0.0; m];
        let mut diff = vec![0i64; x.len()];
        for (c, cell) in self.cells.iter().enumerate() {
            for (a, dv) in diff.iter_mut().enumerate() {
                *dv = x[a] - cell.center[a];
            }
            let k = self.kernel(&diff);
            let g = &noise[c * m..(c + 1) * m];
            for i in 0..m {
                let mut acc = 0.0;
                for j in 0..m {
                    acc += k[i * m + j] * g[j];
                }
                out[i] += acc;
            }
        }
        out
    }

    /// Values at the listed nodes for one seed, node-major.
    fn realize(&self, nodes: &[usize], seed: u64) -> Vec<f64> {
        let m = self.m;
        let stream = RngStream::new(seed);
        let noise: Vec<f64> = (0..self.cells.len())
            .into_par_iter()
            .flat_map_iter(|c| {
                let s = self.cells[c].root_volume;
                stream.normals(c as u64, m).into_iter().map(move |g| g * s)
            })
            .collect();
        let origin = self.convolve(&vec![0; self.grid.d()], &noise);
        let mut values = vec![0.0; nodes.len() * m];
        values
            .par_chunks_mut(m)
            .zip(nodes.par_iter())
            .for_each(|(out, &node)| {
                let v = self.convolve(&self.node_units[node], &noise);
                for i in 0..m {
                    out[i] = v[i] - origin[i];
                }
            });
        values
    }

    pub fn sample_grid(&self, seed: u64) -> Result<FieldSample> {
        let nodes: Vec<usize> = (0..self.grid.len()).collect();
        let values = self.realize(&nodes, seed);
        let mut meta = self.meta.clone();
        meta.seed = seed;
        FieldSample::new(self.grid.clone(), self.m, values, meta)
    }

    /// Values at the listed grid nodes for every seed in `seeds`.
    pub fn sample_nodes(&self, nodes: &[usize], seeds: std::ops::Range<u64>) -> Result<Vec<Vec<f64>>> {
        if let Some(&bad) = nodes.iter().find(|&&n| n >= self.grid.len()) {
            return Err(Error::Validation(format!("node {bad} is outside the grid")));
        }
        Ok(seeds.map(|s| self.realize(nodes, s)).collect())
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `φ(z)^{D−qI/2}` for every `z` on the lattice `unit · Z^d` within
/// `radius` units per axis; the entry at `z = 0` is unused and left zero.
fn kernel_table(
    dec: &SpectralDecomposition<f64>,
    exponent: &Matrix<f64>,
    d: usize,
    m: usize,
    radius: i64,
    unit: f64,
) -> Result<Vec<f64>> {
    let side = (2 * radius + 1) as usize;
    let total = side.pow(d as u32);
    let rows: Vec<Vec<f64>> = (0..total)
        .into_par_iter()
        .map(|flat| -> Result<Vec<f64>> {
            let mut rest = flat;
            let mut z = vec![0.0; d];
            for a in (0..d).rev() {
                z[a] = ((rest % side) as i64 - radius) as f64 * unit;
                rest /= side;
            }
            if z.iter().all(|&v| v == 0.0) {
                return Ok(vec![0.0; m * m]);
            }
            let phi = dec.tau(&z)?;
            let k = matrix_power(exponent, phi)?;
            if !k.is_finite() {
                return Err(Error::numeric("moving-average kernel overflow", phi));
            }
            Ok(k.as_slice().to_vec())
        })
        .collect::<Result<_>>()?;
    Ok(rows.concat())
}

/// One realization of the moving-average field on `grid`.
pub fn moving_average_sample(
    pair: &ScalingPair<f64>,
    grid: &GridSpec,
    truncation: Truncation,
    seed: u64,
) -> Result<FieldSample> {
    MovingAverageField::new(pair, grid, truncation)?.sample_grid(seed)
}
