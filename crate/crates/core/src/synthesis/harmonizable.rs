//! Spectral synthesis of the harmonizable field
//! `X(x) = Re ∫ (e^{i⟨x,ξ⟩} − 1) ψ(ξ)^{−D−qI/2} W(dξ)` with `ψ = τ_{E*}`.
//!
//! Frequencies live on the annular lattice `ξ = 2^{jE*} η`, where `η` runs
//! over the centroids of a Cartesian grid of cells covering the base shell
//! `{1 ≤ τ_{E*}(η) < 2}`. A cell partially inside the shell keeps only the
//! inside fraction of its volume, estimated from `4^d` sub-samples. Since
//! `ψ(2^{jE*}η) = 2^j ψ(η)` and `det 2^{jE*} = 2^{jq}`, radii are computed once
//! per base cell and every level reuses them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::rng::RngStream;
use super::{Discretization, FieldMeta, FieldSample};
use crate::anisotropy::{decompose, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::exponents::ScalingPair;
use crate::matcalc::{matrix_power, Matrix, DEFAULT_GROUP_TOL};

const SUBSAMPLES_PER_AXIS: usize = 4;
const DIRECTION_SAMPLES_PER_DIM: usize = 512;
/// Highest lattice frequency per axis, in multiples of the grid's Nyquist
/// frequency, targeted by [`FrequencySpec::covering`].
pub const NYQUIST_OVERSAMPLING: f64 = 4.0;
/// Base resolution [`FrequencySpec::covering`] uses for paths (`d = 1`). With
/// the default 16 cells per octave a single path at each scale is a sum of a
/// handful of sinusoids, and path statistics scatter accordingly.
pub const PATH_BASE_RESOLUTION: usize = 256;

/// Geometry of the annular frequency lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencySpec {
    pub j_min: i32,
    pub j_max: i32,
    pub base_resolution: usize,
}

impl Default for FrequencySpec {
    fn default() -> Self {
        FrequencySpec {
            j_min: -12,
            j_max: 8,
            base_resolution: 16,
        }
    }
}

impl FrequencySpec {
    pub fn new(j_min: i32, j_max: i32, base_resolution: usize) -> Result<Self> {
        let f = FrequencySpec {
            j_min,
            j_max,
            base_resolution,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j_min < 0 && self.j_max > 0) {
            return Err(Error::Validation(format!(
                "frequency levels need j_min < 0 < j_max, got [{}, {}]",
                self.j_min, self.j_max
            )));
        }
        if self.j_max - self.j_min > 200 {
            return Err(Error::Validation("more than 200 frequency levels".into()));
        }
        if self.base_resolution < 4 || self.base_resolution > 256 {
            return Err(Error::Validation(format!(
                "base_resolution must lie in [4, 256], got {}",
                self.base_resolution
            )));
        }
        Ok(())
    }

    /// Default spec with `j_max` raised until the lattice reaches
    /// [`NYQUIST_OVERSAMPLING`] times the grid's Nyquist frequency along every
    /// axis. Paths get [`PATH_BASE_RESOLUTION`].
    pub fn covering(pair: &ScalingPair<f64>, grid: &GridSpec) -> Result<Self> {
        let e_star = pair.e().transpose();
        let dec = decompose(&e_star, DEFAULT_GROUP_TOL)?;
        let shell = sphere_points(&dec)?;
        let d = grid.d();
        let mut spec = FrequencySpec::default();
        if d == 1 {
            spec.base_resolution = PATH_BASE_RESOLUTION;
        }
        for j in 1..=128 {
            let p = matrix_power(&e_star, 2f64.powi(j))?;
            let reach = (0..d).all(|a| {
                let target = NYQUIST_OVERSAMPLING * std::f64::consts::PI / grid.spacing(a);
                shell
                    .iter()
                    .map(|l| p.matvec(l)[a].abs())
                    .fold(0.0, f64::max)
                    >= target
            });
            if reach {
                spec.j_max = spec.j_max.max(j);
                return Ok(spec);
            }
        }
        Err(Error::numeric(
            "frequency lattice cannot reach the grid's Nyquist frequency",
            0.0,
        ))
    }
}

/// Points on the unit sphere `{τ = 1}` of `dec`, from deterministic random
/// directions.
fn sphere_points(dec: &SpectralDecomposition<f64>) -> Result<Vec<Vec<f64>>> {
    let d = dec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e11);
    let dirs: Vec<Vec<f64>> = (0..DIRECTION_SAMPLES_PER_DIM * d)
        .map(|_| loop {
            let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            if v.iter().any(|x| x.abs() > 1e-3) {
                break v;
            }
        })
        .collect();
    dirs.par_iter()
        .map(|v| dec.polar(v).map(|p| p.direction))
        .collect()
}

struct BaseCell {
    index: u64,
    eta: Vec<f64>,
    psi: f64,
    fraction: f64,
}

/// Cells of the base shell and the volume of one full cell.
fn base_shell(dec: &SpectralDecomposition<f64>, resolution: usize) -> Result<(Vec<BaseCell>, f64)> {
    let d = dec.dim();
    let e = dec.generator();
    let half = matrix_power(e, 0.5)?;
    let double = matrix_power(e, 2.0)?;
    let inside = |eta: &[f64]| -> bool {
        dec.averaged_norm(eta) >= 1.0 && dec.averaged_norm(&half.matvec(eta)) < 1.0
    };

    // Bounding box of {τ < 2} from sampled boundary points, grown until no
    // point of the box surface lies inside.
    let outer: Vec<Vec<f64>> = sphere_points(dec)?
        .iter()
        .map(|l| double.matvec(l))
        .collect();
    let mut bound: Vec<f64> = (0..d)
        .map(|a| 1.05 * outer.iter().map(|p| p[a].abs()).fold(0.0, f64::max))
        .collect();
    let probes = resolution * SUBSAMPLES_PER_AXIS;
    for _ in 0..20 {
        let mut leak = false;
        'faces: for a in 0..d {
            for sign in [-1.0, 1.0] {
                for k in 0..probes.pow(d as u32 - 1) {
                    let mut p = vec![0.0; d];
                    let mut rest = k;
                    for (b, pb) in p.iter_mut().enumerate() {
                        if b == a {
                            *pb = sign * bound[a];
                        } else {
                            let i = rest % probes;
                            rest /= probes;
                            *pb = bound[b] * (2.0 * (i as f64 + 0.5) / probes as f64 - 1.0);
                        }
                    }
                    if dec.averaged_norm(&half.matvec(&p)) < 1.0 {
                        leak = true;
                        break 'faces;
                    }
                }
            }
        }
        if !leak {
            break;
        }
        bound.iter_mut().for_each(|b| *b *= 1.25);
    }

    let widths: Vec<f64> = bound.iter().map(|b| 2.0 * b / resolution as f64).collect();
    let volume: f64 = widths.iter().product();
    let total = resolution.pow(d as u32);
    let subs = SUBSAMPLES_PER_AXIS.pow(d as u32);
    let cells: Vec<Option<BaseCell>> = (0..total)
        .into_par_iter()
        .map(|index| -> Result<Option<BaseCell>> {
            let mut idx = vec![0; d];
            let mut rest = index;
            for a in (0..d).rev() {
                idx[a] = rest % resolution;
                rest /= resolution;
            }
            let mut count = 0usize;
            let mut centroid = vec![0.0; d];
            for s in 0..subs {
                let mut r = s;
                let mut p = vec![0.0; d];
                for a in (0..d).rev() {
                    let k = r % SUBSAMPLES_PER_AXIS;
                    r /= SUBSAMPLES_PER_AXIS;
                    let offset = (k as f64 + 0.5) / SUBSAMPLES_PER_AXIS as f64;
                    p[a] = -bound[a] + (idx[a] as f64 + offset) * widths[a];
                }
                if inside(&p) {
                    count += 1;
                    centroid.iter_mut().zip(&p).for_each(|(c, x)| *c += x);
                }
            }
            if count == 0 {
                return Ok(None);
            }
            centroid.iter_mut().for_each(|c| *c /= count as f64);
            let psi = dec.tau(&centroid)?;
            if !(psi > 0.0) {
                return Err(Error::numeric("frequency cell centroid at the origin", psi));
            }
            Ok(Some(BaseCell {
                index: index as u64,
                eta: centroid,
                psi,
                fraction: count as f64 / subs as f64,
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((cells.into_iter().flatten().collect(), volume))
}

/// The discretized harmonizable field: frequency `ξ_c` and weight matrix
/// `W_c = ψ(ξ_c)^{−D−qI/2} · sqrt(vol_c)` for every lattice cell.
#[derive(Debug, Clone)]
pub struct HarmonizableField {
    d: usize,
    m: usize,
    freq: FrequencySpec,
    xi: Vec<f64>,
    weights: Vec<f64>,
    ids: Vec<u64>,
    meta: FieldMeta,
}

impl HarmonizableField {
    pub fn new(pair: &ScalingPair<f64>, freq: FrequencySpec) -> Result<Self> {
        freq.validate()?;
        let d = pair.dim_domain();
        let m = pair.dim_values();
        let e_star = pair.e().transpose();
        let dec = decompose(&e_star, DEFAULT_GROUP_TOL)?;
        let (base, volume) = base_shell(&dec, freq.base_resolution)?;
        let q = pair.q();
        let exponent = (-pair.d()).shift(-0.5 * q);

        let mut xi = Vec::new();
        let mut weights = Vec::new();
        let mut ids = Vec::new();
        for j in freq.j_min..=freq.j_max {
            let scale = 2f64.powi(j);
            let lift = matrix_power(&e_star, scale)?;
            let level_volume = volume * 2f64.powf(j as f64 * q);
            for cell in &base {
                let k = matrix_power(&exponent, scale * cell.psi)?;
                let w = k.scale((cell.fraction * level_volume).sqrt());
                if !w.is_finite() {
                    return Err(Error::numeric(
                        format!("kernel overflow at frequency level {j}; raise j_min"),
                        f64::INFINITY,
                    ));
                }
                xi.extend(lift.matvec(&cell.eta));
                weights.extend_from_slice(w.as_slice());
                ids.push((((j + (1 << 15)) as u64) << 32) | cell.index);
            }
        }
        Ok(HarmonizableField {
            d,
            m,
            freq,
            xi,
            weights,
            ids,
            meta: FieldMeta::new(pair, 0, Discretization::Harmonizable(freq)),
        })
    }

    pub fn cells(&self) -> usize {
        self.ids.len()
    }

    pub fn frequency_spec(&self) -> FrequencySpec {
        self.freq
    }

    pub fn dim_values(&self) -> usize {
        self.m
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.d {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, field domain has {}",
                x.len(),
                self.d
            )));
        }
        Ok(())
    }

    fn phase(&self, c: usize, x: &[f64]) -> (f64, f64) {
        let xi = &self.xi[c * self.d..(c + 1) * self.d];
        let theta: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        let (s, co) = theta.sin_cos();
        (co - 1.0, s)
    }

    fn weight(&self, c: usize) -> &[f64] {
        let mm = self.m * self.m;
        &self.weights[c * mm..(c + 1) * mm]
    }

    /// `v_c = W_c ζ_c` for one realization, as (real, imaginary) parts.
    fn draw(&self, stream: &RngStream) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..self.cells())
            .into_par_iter()
            .map(|c| {
                let z = stream.complex_normals(self.ids[c], m);
                let w = self.weight(c);
                let mut re = vec![0.0; m];
                let mut im = vec![0.0; m];
                for i in 0..m {
                    for k in 0..m {
                        re[i] += w[i * m + k] * z[k].0;
                        im[i] += w[i * m + k] * z[k].1;
                    }
                }
                (re, im)
            })
            .collect();
        let mut re = Vec::with_capacity(self.cells() * m);
        let mut im = Vec::with_capacity(self.cells() * m);
        for (r, i) in parts {
            re.extend(r);
            im.extend(i);
        }
        (re, im)
    }

    /// Exact covariance `E[X(x) X(y)ᵀ]` of the discretized field.
    pub fn covariance(&self, x: &[f64], y: &[f64]) -> Result<Matrix<f64>> {
        self.check_point(x)?;
        self.check_point(y)?;
        let m = self.m;
        let mut out = Matrix::zeros(m, m);
        for c in 0..self.cells() {
            let (ax, bx) = self.phase(c, x);
            let (ay, by) = self.phase(c, y);
            // Re[(e^{iθx} − 1) conj(e^{iθy} − 1)] / 2
            let f = 0.5 * (ax * ay + bx * by);
            let w = Matrix::new(m, m, self.weight(c).to_vec())?;
            out = &out + &(&w * &w.transpose()).scale(f);
        }
        Ok(out)
    }

    /// One realization on `grid`.
    pub fn sample_grid(&self, grid: &GridSpec, seed: u64) -> Result<FieldSample> {
        if grid.d() != self.d {
            return Err(Error::Dimension(format!(
                "grid has {} axes, field domain has {}",
                grid.d(),
                self.d
            )));
        }
        let m = self.m;
        let (re, im) = self.draw(&RngStream::new(seed));
        let mut values = vec![0.0; grid.len() * m];
        values
            .par_chunks_mut(m)
            .enumerate()
            .for_each(|(node, out)| {
                let x = grid.point(node);
                for c in 0..self.cells() {
                    let (a, b) = self.phase(c, &x);
                    for i in 0..m {
                        out[i] += a * re[c * m + i] - b * im[c * m + i];
                    }
                }
            });
        let mut meta = self.meta.clone();
        meta.seed = seed;
        FieldSample::new(grid.clone(), m, values, meta)
    }

    /// Values at `points` for every seed in `seeds`; entry `s` holds
    /// `points.len() · m` numbers, point-major.
    pub fn sample_points(&self, points: &[Vec<f64>], seeds: std::ops::Range<u64>) -> Result<Vec<Vec<f64>>> {
        for p in points {
            self.check_point(p)?;
        }
        let m = self.m;
        let cells = self.cells();
        let phases: Vec<(f64, f64)> = points
            .iter()
            .flat_map(|p| (0..cells).map(move |c| self.phase(c, p)))
            .collect();
        Ok(seeds
            .into_par_iter()
            .map(|seed| {
                let stream = RngStream::new(seed);
                let mut out = vec![0.0; points.len() * m];
                let mut re = vec![0.0; m];
                let mut im = vec![0.0; m];
                for c in 0..cells {
                    let z = stream.complex_normals(self.ids[c], m);
                    let w = self.weight(c);
                    for i in 0..m {
                        re[i] = 0.0;
                        im[i] = 0.0;
                        for k in 0..m {
                            re[i] += w[i * m + k] * z[k].0;
                            im[i] += w[i * m + k] * z[k].1;
                        }
                    }
                    for p in 0..points.len() {
                        let (a, b) = phases[p * cells + c];
                        for i in 0..m {
                            out[p * m + i] += a * re[i] - b * im[i];
                        }
                    }
                }
                out
            })
            .collect())
    }
}

/// One realization of the harmonizable field on `grid`.
pub fn harmonizable_sample(
    pair: &ScalingPair<f64>,
    grid: &GridSpec,
    freq: FrequencySpec,
    seed: u64,
) -> Result<FieldSample> {
    HarmonizableField::new(pair, freq)?.sample_grid(grid, seed)
}
