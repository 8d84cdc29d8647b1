//! Geometry of a scaling exponent `E`: the spectral decomposition
//! `R^d = W_1 ⊕ … ⊕ W_p` by eigenvalue real parts, an inner product that makes
//! the `W_k` mutually orthogonal, and polar coordinates `x = τ(x)^E · l(x)`.
//!
//! The radius is defined through the averaged gauge
//! `N(x) = ∫_0^∞ ‖e^{−uE} x‖_* du`: `τ(x)` is the unique `r > 0` with
//! `N(r^{−E} x) = 1`. Along `s = ln r` the map `s ↦ N(e^{−sE} x)` has derivative
//! `−‖e^{−sE} x‖_*`, so it is strictly decreasing and the root is found by a
//! safeguarded Newton iteration inside a bisection bracket.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matcalc::{
    cholesky, column_basis, eigen_real_parts, eigenvalues, expm, inverse, matrix_power, norm2, Lu,
    Matrix,
};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;
use crate::stats::{ols, LineFit};

/// Newton/bisection stops once the bracket in `ln r` is narrower than this.
const LOG_RADIUS_TOL: f64 = 1e-12;
const MAX_ROOT_ITERS: usize = 200;
/// Largest admissible |ln r|, i.e. radii in `[2^-200, 2^200]`.
const MAX_LOG_RADIUS: f64 = 200.0 * std::f64::consts::LN_2;
const PANEL_NODES: usize = 16;
const MAX_PANELS: usize = 20_000;

/// One block `W_k` of the decomposition.
#[derive(Debug, Clone)]
pub struct Subspace<T> {
    pub real_part: T,
    /// Euclidean-orthonormal basis of `W_k`.
    pub basis: Vec<Vec<T>>,
}

impl<T> Subspace<T> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Radial and directional part of a point.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint<T> {
    pub tau: T,
    pub direction: Vec<T>,
}

/// Quadrature tables for the averaged gauge: `N(y) ≈ Σ w_i ‖A_i y‖` with
/// `A_i = Lᵀ e^{−u_i E}` and `L` the Cholesky factor of the Gram matrix.
#[derive(Clone)]
struct Gauge<T> {
    chol_t: Matrix<T>,
    weights: Vec<T>,
    tables: Vec<Vec<T>>,
}

#[derive(Clone)]
pub struct SpectralDecomposition<T> {
    generator: Matrix<T>,
    subspaces: Vec<Subspace<T>>,
    projectors: Vec<Matrix<T>>,
    gram: Matrix<T>,
    gauge: Gauge<T>,
    mean_real_part: T,
    /// `Some(c)` when `E = cI`, where the gauge has a closed form.
    scalar: Option<T>,
}

/// Sign function of a matrix with no eigenvalues on the imaginary axis, by
/// Newton iteration with determinant scaling.
fn sign_function<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.rows();
    let nt = T::from_usize(n).unwrap();
    let half = T::lit(0.5);
    let tol = T::epsilon() * T::lit(100.0);
    let mut x = a.clone();
    let mut diff = T::infinity();
    for _ in 0..100 {
        let lu = Lu::new(&x)?;
        if lu.is_singular() {
            return Err(Error::numeric(
                "sign iteration hit a singular iterate (eigenvalue on the splitting line)",
                0.0,
            ));
        }
        let inv = lu.inverse()?;
        let mu = if diff > T::lit(1e-2) {
            lu.det().abs().powf(-T::one() / nt)
        } else {
            T::one()
        };
        let next = (&x.scale(mu) + &inv.scale(T::one() / mu)).scale(half);
        diff = (&next - &x).norm_1() / next.norm_1();
        x = next;
        if diff <= tol {
            break;
        }
    }
    let resid = (&(&x * &x) - &Matrix::identity(n)).norm_1();
    if resid > T::lit(1e-8) {
        return Err(Error::numeric(
            "matrix sign iteration did not converge",
            resid.to_f64_lossy(),
        ));
    }
    Ok(x)
}

/// Spectral decomposition of `E` with the eigenvalue grouping tolerance
/// `group_tol`.
pub fn decompose<T: Real>(e: &Matrix<T>, group_tol: T) -> Result<SpectralDecomposition<T>> {
    let d = e.require_square("scaling exponent")?;
    let structure = eigen_real_parts(e, group_tol)?;
    if structure.min() <= T::zero() {
        return Err(Error::Validation(format!(
            "all eigenvalue real parts of the exponent must be positive, smallest is {}",
            structure.min()
        )));
    }
    let groups = structure.groups().to_vec();
    let p = groups.len();
    let ident = Matrix::identity(d);

    // Q_k projects onto the eigenvalues with real part above the k-th split.
    let mut upper: Vec<Matrix<T>> = vec![ident.clone()];
    for k in 0..p - 1 {
        let split = (groups[k].0 + groups[k + 1].0) * T::lit(0.5);
        let s = sign_function(&e.shift(-split))?;
        upper.push((&ident + &s).scale(T::lit(0.5)));
    }
    upper.push(Matrix::zeros(d, d));

    let scale = T::one() + e.norm_1();
    let mut projectors = Vec::with_capacity(p);
    let mut subspaces = Vec::with_capacity(p);
    for k in 0..p {
        let proj = &upper[k] - &upper[k + 1];
        let idem = (&(&proj * &proj) - &proj).norm_1();
        let comm = (&(&proj * e) - &(e * &proj)).norm_1();
        if idem > T::lit(1e-8) * (T::one() + proj.norm_1()) || comm > T::lit(1e-7) * scale {
            return Err(Error::numeric(
                format!("spectral projector {k} is inaccurate (idempotence {idem:e}, commutator {comm:e})"),
                idem.max(comm).to_f64_lossy(),
            ));
        }
        let rank = groups[k].1;
        let (basis, rejected, weakest) = column_basis(&proj, rank);
        if rejected > T::lit(1e-6) || weakest < T::lit(1e-8) {
            return Err(Error::numeric(
                format!(
                    "rank of subspace {k} is ambiguous: expected {rank}, residual pivot {rejected:e}, weakest kept pivot {weakest:e}"
                ),
                rejected.to_f64_lossy(),
            ));
        }
        projectors.push(proj);
        subspaces.push(Subspace {
            real_part: groups[k].0,
            basis,
        });
    }

    let columns: Vec<Vec<T>> = subspaces.iter().flat_map(|s| s.basis.clone()).collect();
    let b = Matrix::from_columns(&columns)?;
    let b_inv = inverse(&b)?;
    let g = &b_inv.transpose() * &b_inv;
    let gram = (&g + &g.transpose()).scale(T::lit(0.5));

    let gauge = Gauge::build(e, &gram, structure.min())?;
    let c = e[(0, 0)];
    let is_scalar = (0..d).all(|i| (0..d).all(|j| e[(i, j)] == if i == j { c } else { T::zero() }));
    Ok(SpectralDecomposition {
        scalar: is_scalar.then_some(c),
        generator: e.clone(),
        subspaces,
        projectors,
        gram,
        gauge,
        mean_real_part: structure.weighted_sum() / T::from_usize(d).unwrap(),
    })
}

impl<T: Real> Gauge<T> {
    fn build(e: &Matrix<T>, gram: &Matrix<T>, min_real: T) -> Result<Self> {
        let d = e.rows();
        let l = cholesky(gram)?;
        let chol_t = l.transpose();
        let l_t_inv = inverse(&chol_t)?;
        let rho = eigenvalues(e)?
            .into_iter()
            .map(|(re, im)| (re * re + im * im).sqrt())
            .fold(T::zero(), T::max);
        let width = T::lit(4.0) / rho.max(min_real);
        // Integrand norm bound in the adapted coordinates, relative to the
        // gauge of a unit vector, which is at least 1/‖E‖_*.
        let e_star = (&(&chol_t * e) * &l_t_inv).norm_fro();
        let stop = T::lit(1e-16) / e_star.max(T::one()) * min_real;

        let (gx, gw) = gauss_legendre(PANEL_NODES);
        let mut weights = Vec::new();
        let mut tables = Vec::new();
        let half_w = width * T::lit(0.5);
        let mut below = 0;
        let mut panel = 0;
        loop {
            let start = width * T::from_usize(panel).unwrap();
            let mid = start + half_w;
            for (x, w) in gx.iter().zip(&gw) {
                let u = mid + half_w * T::lit(*x);
                let m = &chol_t * &expm(&e.scale(-u))?;
                tables.push(m.as_slice().to_vec());
                weights.push(half_w * T::lit(*w));
            }
            panel += 1;
            let end = width * T::from_usize(panel).unwrap();
            let at_end = &(&chol_t * &expm(&e.scale(-end))?) * &l_t_inv;
            if at_end.norm_fro() <= stop {
                below += 1;
                if below >= 2 {
                    // Exponential tail beyond the last panel: ∫_U^∞ ≈ g(U)/a_1.
                    let m = &chol_t * &expm(&e.scale(-end))?;
                    tables.push(m.as_slice().to_vec());
                    weights.push(T::one() / min_real);
                    break;
                }
            } else {
                below = 0;
            }
            if panel >= MAX_PANELS {
                return Err(Error::numeric(
                    "gauge quadrature range did not close; exponent too ill-conditioned",
                    at_end.norm_fro().to_f64_lossy(),
                ));
            }
        }
        debug_assert!(tables.iter().all(|t| t.len() == d * d));
        Ok(Gauge {
            chol_t,
            weights,
            tables,
        })
    }

    fn adapted_norm(&self, y: &[T]) -> T {
        norm2(&self.chol_t.matvec(y))
    }

    fn averaged(&self, y: &[T]) -> T {
        let d = y.len();
        let mut total = T::zero();
        for (tab, &w) in self.tables.iter().zip(&self.weights) {
            let mut sq = T::zero();
            for i in 0..d {
                let row = &tab[i * d..(i + 1) * d];
                let v = row.iter().zip(y).fold(T::zero(), |s, (&a, &b)| s + a * b);
                sq = sq + v * v;
            }
            total = total + w * sq.sqrt();
        }
        total
    }
}

impl<T: Real> std::fmt::Debug for SpectralDecomposition<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralDecomposition")
            .field("generator", &self.generator)
            .field("profile", &self.profile())
            .finish()
    }
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn generator(&self) -> &Matrix<T> {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn subspaces(&self) -> &[Subspace<T>] {
        &self.subspaces
    }

    pub fn projectors(&self) -> &[Matrix<T>] {
        &self.projectors
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    /// `(a_k, dim W_k)` for each block, `a_k` ascending.
    pub fn profile(&self) -> Vec<(T, usize)> {
        self.subspaces.iter().map(|s| (s.real_part, s.dim())).collect()
    }

    /// Components `x_k = P_k x`.
    pub fn components(&self, x: &[T]) -> Vec<Vec<T>> {
        self.projectors.iter().map(|p| p.matvec(x)).collect()
    }

    /// `‖x‖_* = (xᵀ G x)^{1/2}`.
    pub fn adapted_norm(&self, x: &[T]) -> T {
        self.gauge.adapted_norm(x)
    }

    /// The averaged gauge `N_E(x) = ∫_0^∞ ‖e^{−uE} x‖_* du`.
    pub fn averaged_norm(&self, x: &[T]) -> T {
        if let Some(c) = self.scalar {
            return self.gauge.adapted_norm(x) / c;
        }
        self.gauge.averaged(x)
    }

    /// `c^E x`.
    pub fn scale_point(&self, c: T, x: &[T]) -> Result<Vec<T>> {
        Ok(matrix_power(&self.generator, c)?.matvec(x))
    }

    fn check_point(&self, x: &[T]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "point has {} coordinates, expected {}",
                x.len(),
                self.dim()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("point has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// Polar coordinates `(τ_E(x), l_E(x))`; the origin maps to `(0, 0)`.
    pub fn polar(&self, x: &[T]) -> Result<PolarPoint<T>> {
        self.check_point(x)?;
        if x.iter().all(|v| *v == T::zero()) {
            return Ok(PolarPoint {
                tau: T::zero(),
                direction: vec![T::zero(); x.len()],
            });
        }
        if let Some(c) = self.scalar {
            let tau = (self.gauge.adapted_norm(x) / c).powf(T::one() / c);
            let shrink = tau.powf(-c);
            return Ok(PolarPoint {
                tau,
                direction: x.iter().map(|&v| v * shrink).collect(),
            });
        }
        let tol = T::lit(LOG_RADIUS_TOL).max(T::epsilon() * T::lit(64.0));
        let limit = T::lit(MAX_LOG_RADIUS);
        let eval = |s: T| -> Result<(T, T, Vec<T>)> {
            let y = expm(&self.generator.scale(-s))?.matvec(x);
            Ok((self.gauge.averaged(&y), self.gauge.adapted_norm(&y), y))
        };

        let n0 = self.gauge.averaged(x);
        let mut s = n0.ln() / self.mean_real_part;
        // Bracket in s: F(lo) > 1 > F(hi).
        let mut lo: Option<T> = None;
        let mut hi: Option<T> = None;
        for _ in 0..MAX_ROOT_ITERS {
            if s.abs() > limit {
                return Err(Error::numeric(
                    "radius outside [2^-200, 2^200]; exponent or point is pathologically scaled",
                    s.to_f64_lossy(),
                ));
            }
            let (f, g, y) = eval(s)?;
            let h = f.ln();
            if h == T::zero() || h.abs() <= T::epsilon() * T::lit(4.0) {
                return Ok(PolarPoint {
                    tau: s.exp(),
                    direction: y,
                });
            }
            if h > T::zero() {
                lo = Some(lo.map_or(s, |v| v.max(s)));
            } else {
                hi = Some(hi.map_or(s, |v| v.min(s)));
            }
            // Newton step on ln F: d/ds ln F = −g/F.
            let step = h * f / g;
            let mut next = s + step;
            match (lo, hi) {
                (Some(a), Some(b)) => {
                    if !(next > a && next < b) || !next.is_finite() {
                        next = (a + b) * T::lit(0.5);
                    }
                    if b - a <= tol && (next - s).abs() <= tol {
                        let (_, _, y) = eval(next)?;
                        return Ok(PolarPoint {
                            tau: next.exp(),
                            direction: y,
                        });
                    }
                }
                _ => {
                    let cap = T::lit(8.0);
                    if !next.is_finite() {
                        next = s + if h > T::zero() { cap } else { -cap };
                    } else if step.abs() > cap {
                        next = s + cap * step.signum();
                    }
                }
            }
            if (next - s).abs() <= tol * T::lit(1e-2) {
                let (_, _, y) = eval(next)?;
                return Ok(PolarPoint {
                    tau: next.exp(),
                    direction: y,
                });
            }
            s = next;
        }
        Err(Error::numeric(
            "radial root search did not converge",
            s.to_f64_lossy(),
        ))
    }

    /// The radius `τ_E(x)`.
    pub fn tau(&self, x: &[T]) -> Result<T> {
        Ok(self.polar(x)?.tau)
    }

    /// `τ_E(x − y)`.
    pub fn tau_quasi_metric(&self, x: &[T], y: &[T]) -> Result<T> {
        let diff: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
        self.tau(&diff)
    }

    /// `E`-homogeneous function used as the kernel radius: `φ = τ_E`.
    pub fn homogeneous_phi(&self, x: &[T]) -> Result<T> {
        self.tau(x)
    }

    /// Inverse of [`polar`](Self::polar): `τ^E · l`.
    pub fn reconstruct(&self, p: &PolarPoint<T>) -> Result<Vec<T>> {
        if p.tau == T::zero() {
            return Ok(vec![T::zero(); self.dim()]);
        }
        Ok(expm(&self.generator.scale(p.tau.ln()))?.matvec(&p.direction))
    }

    /// Regression of `ln τ_E(x)` on `ln ‖x‖` for points of `W_k` (1-based `k`)
    /// with norms log-uniform in `[1e-4, 1]`. The slope approximates `1/a_k`.
    pub fn subspace_exponent_fit(&self, k: usize, samples: usize) -> Result<LineFit> {
        if k == 0 || k > self.subspaces.len() {
            return Err(Error::Validation(format!(
                "subspace index {k} outside 1..={}",
                self.subspaces.len()
            )));
        }
        if samples < 8 {
            return Err(Error::Validation(format!(
                "need at least 8 distinct scales, got {samples}"
            )));
        }
        let sub = &self.subspaces[k - 1];
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + k as u64);
        let mut lx = Vec::with_capacity(samples);
        let mut lt = Vec::with_capacity(samples);
        for i in 0..samples {
            // Stratified scales so every decade is represented.
            let u = (i as f64 + rng.random::<f64>()) / samples as f64;
            let radius = 10f64.powf(-4.0 + 4.0 * u);
            let coeffs: Vec<f64> = (0..sub.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let mut x = vec![T::zero(); self.dim()];
            for (c, b) in coeffs.iter().zip(&sub.basis) {
                for (xi, &bi) in x.iter_mut().zip(b) {
                    *xi = *xi + T::lit(*c) * bi;
                }
            }
            let n = norm2(&x);
            if n == T::zero() {
                continue;
            }
            let x: Vec<T> = x.iter().map(|&v| v / n * T::lit(radius)).collect();
            lx.push(norm2(&x).to_f64_lossy().ln());
            lt.push(self.tau(&x)?.to_f64_lossy().ln());
        }
        ols(&lx, &lt).ok_or_else(|| Error::Validation("degenerate regression".into()))
    }

    /// Empirical quasi-triangle constant: the largest observed
    /// `τ(x + y) / (τ(x) + τ(y))` over random pairs in `[-1, 1]^d`.
    pub fn quasi_triangle_constant(&self, samples: usize, seed: u64) -> Result<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = self.dim();
        let mut worst = T::zero();
        for _ in 0..samples {
            let x: Vec<T> = (0..d).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
            let y: Vec<T> = (0..d).map(|_| T::lit(rng.random_range(-1.0..1.0))).collect();
            let s: Vec<T> = x.iter().zip(&y).map(|(&a, &b)| a + b).collect();
            let denom = self.tau(&x)? + self.tau(&y)?;
            if denom > T::zero() {
                worst = worst.max(self.tau(&s)? / denom);
            }
        }
        Ok(worst)
    }
}
