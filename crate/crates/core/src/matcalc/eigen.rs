//! Eigenvalues of small real nonsymmetric matrices: balancing, Householder
//! reduction to upper Hessenberg form, then Francis double-shift QR.

use crate::error::{Error, Result};
use crate::matcalc::matrix::Matrix;
use crate::scalar::Real;

pub const MAX_DIM: usize = 16;
pub const DEFAULT_GROUP_TOL: f64 = 1e-6;

/// Eigenvalue real parts grouped by proximity, ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure<T> {
    groups: Vec<(T, usize)>,
    total: usize,
}

impl<T: Real> EigenStructure<T> {
    /// Builds a structure from explicit groups, which must be non-empty,
    /// strictly increasing, and of positive multiplicity.
    pub fn new(groups: Vec<(T, usize)>) -> Result<Self> {
        if groups.is_empty() || groups.iter().any(|g| g.1 == 0 || !g.0.is_finite()) {
            return Err(Error::Validation(
                "eigen structure needs finite groups of positive multiplicity".into(),
            ));
        }
        if groups.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Validation(
                "eigen structure groups must be strictly increasing".into(),
            ));
        }
        let total = groups.iter().map(|g| g.1).sum();
        Ok(EigenStructure { groups, total })
    }

    pub fn groups(&self) -> &[(T, usize)] {
        &self.groups
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn real_parts(&self) -> Vec<T> {
        self.groups.iter().map(|g| g.0).collect()
    }

    /// Real parts repeated by multiplicity, ascending.
    pub fn with_multiplicity(&self) -> Vec<T> {
        self.groups
            .iter()
            .flat_map(|&(v, k)| std::iter::repeat_n(v, k))
            .collect()
    }

    pub fn min(&self) -> T {
        self.groups[0].0
    }

    pub fn max(&self) -> T {
        self.groups[self.groups.len() - 1].0
    }

    /// Σ real_part·multiplicity, which equals the trace of the source matrix.
    pub fn weighted_sum(&self) -> T {
        self.groups
            .iter()
            .map(|&(v, k)| v * T::from_usize(k).unwrap())
            .sum()
    }
}

/// All eigenvalues as `(re, im)` pairs, in no particular order.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<(T, T)>> {
    let n = a.require_square("eigenvalue input")?;
    if n > MAX_DIM {
        return Err(Error::Dimension(format!(
            "eigenvalue solver supports dimension <= {MAX_DIM}, got {n}"
        )));
    }
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    hqr(h)
}

/// Eigenvalue real parts with algebraic multiplicity; consecutive sorted
/// values closer than `group_tol` share a group, reported by their mean.
pub fn eigen_real_parts<T: Real>(a: &Matrix<T>, group_tol: T) -> Result<EigenStructure<T>> {
    let mut re: Vec<T> = eigenvalues(a)?.into_iter().map(|(r, _)| r).collect();
    re.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    let mut groups: Vec<(T, usize)> = Vec::new();
    let mut members: Vec<T> = Vec::new();
    for v in re {
        if let Some(&last) = members.last() {
            if v - last >= group_tol {
                groups.push(mean_group(&members));
                members.clear();
            }
        }
        members.push(v);
    }
    groups.push(mean_group(&members));
    Ok(EigenStructure {
        groups,
        total: a.rows(),
    })
}

fn mean_group<T: Real>(members: &[T]) -> (T, usize) {
    let k = members.len();
    let s: T = members.iter().copied().sum();
    (s / T::from_usize(k).unwrap(), k)
}

fn balance<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    let radix = T::lit(2.0);
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut r = T::zero();
            let mut c = T::zero();
            for j in 0..n {
                if j != i {
                    c = c + a[(j, i)].abs();
                    r = r + a[(i, j)].abs();
                }
            }
            if c != T::zero() && r != T::zero() {
                let mut g = r / radix;
                let mut f = T::one();
                let s = c + r;
                while c < g {
                    f = f * radix;
                    c = c * sqrdx;
                }
                g = r * radix;
                while c > g {
                    f = f / radix;
                    c = c / sqrdx;
                }
                if (c + r) / f < T::lit(0.95) * s {
                    done = false;
                    let g = T::one() / f;
                    for j in 0..n {
                        a[(i, j)] = a[(i, j)] * g;
                    }
                    for j in 0..n {
                        a[(j, i)] = a[(j, i)] * f;
                    }
                }
            }
        }
    }
}

fn hessenberg<T: Real>(a: &mut Matrix<T>) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let alpha = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<T>().sqrt();
        if alpha == T::zero() {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let sign = if x0 >= T::zero() { T::one() } else { -T::one() };
        let mut v = vec![T::zero(); n];
        v[k + 1] = x0 + sign * alpha;
        for i in k + 2..n {
            v[i] = a[(i, k)];
        }
        let vtv: T = v.iter().map(|&x| x * x).sum();
        if vtv == T::zero() {
            continue;
        }
        let beta = T::lit(2.0) / vtv;
        // A <- H A
        for j in 0..n {
            let s: T = (k + 1..n).map(|i| v[i] * a[(i, j)]).sum();
            let s = s * beta;
            for i in k + 1..n {
                a[(i, j)] = a[(i, j)] - s * v[i];
            }
        }
        // A <- A H
        for i in 0..n {
            let s: T = (k + 1..n).map(|j| a[(i, j)] * v[j]).sum();
            let s = s * beta;
            for j in k + 1..n {
                a[(i, j)] = a[(i, j)] - s * v[j];
            }
        }
        for i in k + 2..n {
            a[(i, k)] = T::zero();
        }
    }
}

fn sign<T: Real>(a: T, b: T) -> T {
    if b >= T::zero() {
        a.abs()
    } else {
        -a.abs()
    }
}

#[allow(clippy::many_single_char_names)]
const MAX_QR_ITERATIONS: usize = 300;

fn hqr<T: Real>(mut a: Matrix<T>) -> Result<Vec<(T, T)>> {
    let n = a.rows();
    let eps = T::epsilon();
    let mut out = vec![(T::zero(), T::zero()); n];
    let mut anorm = T::zero();
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm = anorm + a[(i, j)].abs();
        }
    }
    let half = T::lit(0.5);
    let mut nn = n as isize - 1;
    let mut t = T::zero();
    let (mut p, mut q, mut r);
    let (mut x, mut y, mut z, mut w);
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l > 0 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == T::zero() {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s {
                    a[(l, l - 1)] = T::zero();
                    break;
                }
                l -= 1;
            }
            x = a[(nu, nu)];
            if l == nu {
                out[nu] = (x + t, T::zero());
                nn -= 1;
            } else {
                y = a[(nu - 1, nu - 1)];
                w = a[(nu, nu - 1)] * a[(nu - 1, nu)];
                if l + 1 == nu {
                    p = half * (y - x);
                    q = p * p + w;
                    z = q.abs().sqrt();
                    x = x + t;
                    if q >= T::zero() {
                        z = p + sign(z, p);
                        out[nu - 1] = (x + z, T::zero());
                        out[nu] = (x + z, T::zero());
                        if z != T::zero() {
                            out[nu] = (x - w / z, T::zero());
                        }
                    } else {
                        out[nu] = (x + p, -z);
                        out[nu - 1] = (x + p, z);
                    }
                    nn -= 2;
                } else {
                    // Defective eigenvalues converge slowly, so allow a
                    // generous budget with an exceptional shift every 10 steps.
                    if its == MAX_QR_ITERATIONS {
                        return Err(Error::numeric(
                            "eigenvalue iteration did not converge",
                            a[(nu, nu - 1)].abs().to_f64_lossy(),
                        ));
                    }
                    if its > 0 && its % 10 == 0 {
                        t = t + x;
                        for i in 0..=nu {
                            a[(i, i)] = a[(i, i)] - x;
                        }
                        let s = a[(nu, nu - 1)].abs() + a[(nu - 1, nu - 2)].abs();
                        x = T::lit(0.75) * s;
                        y = x;
                        w = T::lit(-0.4375) * s * s;
                    }
                    its += 1;
                    let mut m = nu - 2;
                    loop {
                        z = a[(m, m)];
                        r = x - z;
                        let s = y - z;
                        p = (r * s - w) / a[(m + 1, m)] + a[(m, m + 1)];
                        q = a[(m + 1, m + 1)] - z - r - s;
                        r = a[(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p = p / s;
                        q = q / s;
                        r = r / s;
                        if m == l {
                            break;
                        }
                        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m..nu - 1 {
                        a[(i + 2, i)] = T::zero();
                        if i != m {
                            a[(i + 2, i - 1)] = T::zero();
                        }
                    }
                    for k in m..nu {
                        if k != m {
                            p = a[(k, k - 1)];
                            q = a[(k + 1, k - 1)];
                            r = T::zero();
                            if k + 1 != nu {
                                r = a[(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != T::zero() {
                                p = p / x;
                                q = q / x;
                                r = r / x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != T::zero() {
                            if k == m {
                                if l != m {
                                    a[(k, k - 1)] = -a[(k, k - 1)];
                                }
                            } else {
                                a[(k, k - 1)] = -s * x;
                            }
                            p = p + s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q = q / p;
                            r = r / p;
                            for j in k..=nu {
                                p = a[(k, j)] + q * a[(k + 1, j)];
                                if k + 1 != nu {
                                    p = p + r * a[(k + 2, j)];
                                    a[(k + 2, j)] = a[(k + 2, j)] - p * z;
                                }
                                a[(k + 1, j)] = a[(k + 1, j)] - p * y;
                                a[(k, j)] = a[(k, j)] - p * x;
                            }
                            let mmin = if nu < k + 3 { nu } else { k + 3 };
                            for i in l..=mmin {
                                p = x * a[(i, k)] + y * a[(i, k + 1)];
                                if k + 1 != nu {
                                    p = p + z * a[(i, k + 2)];
                                    a[(i, k + 2)] = a[(i, k + 2)] - p * r;
                                }
                                a[(i, k + 1)] = a[(i, k + 1)] - p * q;
                                a[(i, k)] = a[(i, k)] - p;
                            }
                        }
                    }
                }
            }
            if nn < 0 || l + 1 >= nn as usize {
                break;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    #[test]
    fn two_defective_blocks_converge() {
        // Conjugated diag(J_2(0.7), J_2(1.1)); needed more than 60 QR steps.
        let a = Matrix::from_rows(&[
            [0.836282101051894, 0.3837461678004604, 0.1536307248440335, 0.21896954276129227],
            [-0.10650958705572455, 0.5999859864674812, -0.08734872412301492, -0.24637701465767498],
            [0.18973908687531152, 0.042404637600114786, 1.0244687269005548, 0.37871191203282045],
            [0.13958404880732106, 0.0237141914343027, -0.03353207886051518, 1.1392631855800701],
        ])
        .unwrap();
        let mut re: Vec<f64> = eigenvalues(&a).unwrap().iter().map(|e| e.0).collect();
        re.sort_by(|x, y| x.total_cmp(y));
        for (v, t) in re.iter().zip([0.7, 0.7, 1.1, 1.1]) {
            assert!((v - t).abs() < 1e-6, "{re:?}");
        }
    }

    use super::*;

    #[test]
    fn diagonal_groups() {
        let s = eigen_real_parts(&Matrix::diag(&[3.0, 1.0, 2.0]), 1e-6).unwrap();
        assert_eq!(s.groups(), &[(1.0, 1), (2.0, 1), (3.0, 1)]);
        assert_eq!(s.total(), 3);
    }

    #[test]
    fn complex_pair_shares_real_part() {
        // Characteristic polynomial x^2 - 2x + 2, roots 1 ± i.
        let a = Matrix::from_rows(&[[1.0, -1.0], [1.0, 1.0]]).unwrap();
        let s = eigen_real_parts(&a, 1e-6f64).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.groups()[0].1, 2);
        assert!((s.groups()[0].0 - 1.0).abs() < 1e-12);
        let ev = eigenvalues(&a).unwrap();
        assert!(ev.iter().all(|&(_, im): &(f64, f64)| (im.abs() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn jordan_block_is_one_group() {
        let a = Matrix::from_rows(&[[0.5, 1.0], [0.0, 0.5]]).unwrap();
        let s = eigen_real_parts(&a, 1e-6).unwrap();
        assert_eq!(s.groups(), &[(0.5, 2)]);
    }

    #[test]
    fn companion_matrix_roots() {
        // x^3 - 6x^2 + 11x - 6 = (x-1)(x-2)(x-3)
        let a = Matrix::<f64>::from_rows(&[[6.0, -11.0, 6.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let s = eigen_real_parts(&a, 1e-6).unwrap();
        let re = s.real_parts();
        for (got, want) in re.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn too_large_is_rejected() {
        let a = Matrix::<f64>::identity(17);
        assert!(matches!(eigenvalues(&a), Err(Error::Dimension(_))));
    }
}
