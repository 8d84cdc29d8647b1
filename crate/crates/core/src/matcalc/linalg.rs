use crate::error::{Error, Result};
use crate::matcalc::matrix::{norm2, Matrix};
use crate::scalar::Real;

/// Condition number above which a system is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// LU factorisation with partial pivoting, `P·A = L·U` packed in one matrix.
#[derive(Clone)]
pub struct Lu<T> {
    packed: Matrix<T>,
    perm: Vec<usize>,
    sign: T,
    singular: bool,
}

impl<T: Real> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let n = a.require_square("LU input")?;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = T::one();
        let mut singular = false;
        let scale = a.max_abs().max(T::min_positive_value());
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -T::one()), |best, c| if c.1 > best.1 { c } else { best });
            if pivot <= T::epsilon() * scale * T::lit(1e-3) {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let d = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / d;
                lu[(i, k)] = f;
                if f != T::zero() {
                    for j in k + 1..n {
                        lu[(i, j)] = lu[(i, j)] - f * lu[(k, j)];
                    }
                }
            }
        }
        Ok(Lu {
            packed: lu,
            perm,
            sign,
            singular,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> T {
        if self.singular {
            return T::zero();
        }
        let n = self.packed.rows();
        (0..n).fold(self.sign, |acc, i| acc * self.packed[(i, i)])
    }

    fn solve_unchecked(&self, b: &[T]) -> Vec<T> {
        let n = self.packed.rows();
        let mut x: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s = s - self.packed[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s = s - self.packed[(i, j)] * x[j];
            }
            x[i] = s / self.packed[(i, i)];
        }
        x
    }

    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        if self.singular {
            return Err(Error::numeric("singular matrix", f64::INFINITY));
        }
        Ok(self.solve_unchecked(b))
    }

    pub fn inverse(&self) -> Result<Matrix<T>> {
        if self.singular {
            return Err(Error::numeric("singular matrix", f64::INFINITY));
        }
        let n = self.packed.rows();
        let mut inv = Matrix::zeros(n, n);
        let mut e = vec![T::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = T::zero());
            e[j] = T::one();
            let col = self.solve_unchecked(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        Ok(inv)
    }
}

pub fn det<T: Real>(a: &Matrix<T>) -> Result<T> {
    Ok(Lu::new(a)?.det())
}

pub fn inverse<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    Lu::new(a)?.inverse()
}

/// 1-norm condition number, computed exactly from the explicit inverse.
pub fn condition_1<T: Real>(a: &Matrix<T>) -> Result<T> {
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Ok(T::infinity());
    }
    Ok(a.norm_1() * lu.inverse()?.norm_1())
}

/// Solves `A·x = b` with one step of iterative refinement.
///
/// Systems whose 1-norm condition number reaches `MAX_CONDITION` are refused.
pub fn solve_linear<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.require_square("system matrix")?;
    if b.len() != n {
        return Err(Error::Dimension(format!(
            "right-hand side has length {}, expected {n}",
            b.len()
        )));
    }
    let lu = Lu::new(a)?;
    if lu.is_singular() {
        return Err(Error::numeric("singular system matrix", f64::INFINITY));
    }
    let cond = a.norm_1() * lu.inverse()?.norm_1();
    if !(cond.to_f64_lossy() < MAX_CONDITION) {
        return Err(Error::numeric(
            format!("system matrix is ill-conditioned (cond_1 = {:e})", cond.to_f64_lossy()),
            cond.to_f64_lossy(),
        ));
    }
    let mut x = lu.solve(b)?;
    let ax = a.matvec(&x);
    let r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    let dx = lu.solve(&r)?;
    for (xi, di) in x.iter_mut().zip(dx) {
        *xi = *xi + di;
    }
    Ok(x)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.require_square("Cholesky input")?;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut s = a[(j, j)];
        for k in 0..j {
            s = s - l[(j, k)] * l[(j, k)];
        }
        if s <= T::zero() {
            return Err(Error::numeric("matrix is not positive definite", s.to_f64_lossy()));
        }
        let d = s.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s = s - l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / d;
        }
    }
    Ok(l)
}

/// Orthonormal basis of the column space of `a`, with the rank fixed in
/// advance. Modified Gram–Schmidt with column pivoting; returns the basis and
/// the ratio of the first rejected pivot to the largest pivot, which callers
/// use to judge whether the rank decision was clear-cut.
pub fn column_basis<T: Real>(a: &Matrix<T>, rank: usize) -> (Vec<Vec<T>>, T, T) {
    let mut cols: Vec<Vec<T>> = (0..a.cols()).map(|j| a.column(j)).collect();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(rank);
    let mut first = T::zero();
    let mut last_kept = T::zero();
    for _ in 0..rank {
        let (idx, nrm) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, norm2(c)))
            .fold((0, -T::one()), |b, c| if c.1 > b.1 { c } else { b });
        if basis.is_empty() {
            first = nrm;
        }
        last_kept = nrm;
        let q: Vec<T> = cols[idx].iter().map(|&v| v / nrm).collect();
        for c in cols.iter_mut() {
            let p = q.iter().zip(c.iter()).fold(T::zero(), |s, (&a, &b)| s + a * b);
            for (ci, &qi) in c.iter_mut().zip(&q) {
                *ci = *ci - p * qi;
            }
        }
        basis.push(q);
    }
    let rejected = cols.iter().map(|c| norm2(c)).fold(T::zero(), T::max);
    let scale = first.max(T::min_positive_value());
    (basis, rejected / scale, last_kept / scale)
}
