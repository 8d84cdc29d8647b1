//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13 (Higham's 2005 selection rule).

use crate::error::{Error, Result};
use crate::matcalc::linalg::Lu;
use crate::matcalc::matrix::Matrix;
use crate::scalar::Real;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120., 60., 12., 1.];
const B5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const B7: [f64; 8] = [17297280., 8648640., 1995840., 277200., 25200., 1512., 56., 1.];
const B9: [f64; 10] = [
    17643225600.,
    8821612800.,
    2075673600.,
    302702400.,
    30270240.,
    2162160.,
    110880.,
    3960.,
    90.,
    1.,
];
const B13: [f64; 14] = [
    64764752532480000.,
    32382376266240000.,
    7771770303897600.,
    1187353796428800.,
    129060195264000.,
    10559470521600.,
    670442572800.,
    33522128640.,
    1323241920.,
    40840800.,
    960960.,
    16380.,
    182.,
    1.,
];

/// `exp(A)` for a square matrix.
pub fn expm<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>> {
    let n = a.require_square("exponent matrix")?;
    if !a.is_finite() {
        return Err(Error::Domain("matrix exponent has non-finite entries".into()));
    }
    let ident = Matrix::identity(n);
    let norm = a.norm_1().to_f64_lossy();
    if norm == 0.0 {
        return Ok(ident);
    }

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &B3,
                5 => &B5,
                7 => &B7,
                _ => &B9,
            };
            return pade_low(a, coeffs, &ident);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    let scaled = a.scale(T::lit(2f64.powi(-s)));
    let mut r = pade13(&scaled, &ident)?;
    for _ in 0..s {
        r = &r * &r;
    }
    if !r.is_finite() {
        return Err(Error::numeric("matrix exponential overflowed", f64::INFINITY));
    }
    Ok(r)
}

fn pade_low<T: Real>(a: &Matrix<T>, b: &[f64], ident: &Matrix<T>) -> Result<Matrix<T>> {
    let a2 = a * a;
    // Even powers A^0, A^2, A^4, ...
    let mut powers = vec![ident.clone(), a2.clone()];
    while powers.len() * 2 < b.len() {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let n = a.rows();
    let mut u_inner = Matrix::zeros(n, n);
    let mut v = Matrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        if 2 * k + 1 < b.len() {
            u_inner = &u_inner + &p.scale(T::lit(b[2 * k + 1]));
        }
        v = &v + &p.scale(T::lit(b[2 * k]));
    }
    let u = a * &u_inner;
    solve_pade(&u, &v)
}

fn pade13<T: Real>(a: &Matrix<T>, ident: &Matrix<T>) -> Result<Matrix<T>> {
    let b = |i: usize| T::lit(B13[i]);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let inner_u = &(&(&a6.scale(b(13)) + &a4.scale(b(11))) + &a2.scale(b(9)));
    let u_tail = &(&(&a6.scale(b(7)) + &a4.scale(b(5))) + &a2.scale(b(3))) + &ident.scale(b(1));
    let u = a * &(&(&a6 * inner_u) + &u_tail);
    let inner_v = &(&a6.scale(b(12)) + &a4.scale(b(10))) + &a2.scale(b(8));
    let v_tail = &(&(&a6.scale(b(6)) + &a4.scale(b(4))) + &a2.scale(b(2))) + &ident.scale(b(0));
    let v = &(&a6 * &inner_v) + &v_tail;
    solve_pade(&u, &v)
}

/// Solves `(V − U)·R = V + U`.
fn solve_pade<T: Real>(u: &Matrix<T>, v: &Matrix<T>) -> Result<Matrix<T>> {
    let p = v + u;
    let q = v - u;
    let lu = Lu::new(&q)?;
    if lu.is_singular() {
        return Err(Error::numeric("Padé denominator is singular", f64::INFINITY));
    }
    let n = u.rows();
    let mut r = Matrix::zeros(n, n);
    for j in 0..n {
        let col = lu.solve(&p.column(j))?;
        for i in 0..n {
            r[(i, j)] = col[i];
        }
    }
    Ok(r)
}

/// The matrix power `c^A = exp(A·ln c)` for a positive scalar base.
pub fn matrix_power<T: Real>(a: &Matrix<T>, c: T) -> Result<Matrix<T>> {
    a.require_square("matrix power exponent")?;
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::Domain(format!(
            "matrix power base must be positive and finite, got {c}"
        )));
    }
    if c == T::one() {
        return Ok(Matrix::identity(a.rows()));
    }
    expm(&a.scale(c.ln()))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Term-by-term Taylor series of exp(M), 30 terms.
    fn series_oracle(m: &Matrix<f64>) -> Matrix<f64> {
        let n = m.rows();
        let mut term = Matrix::identity(n);
        let mut sum = Matrix::identity(n);
        for k in 1..30 {
            term = (&term * m).scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        sum
    }

    fn rel_err(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
        (a - b).norm_1() / b.norm_1()
    }

    #[test]
    fn base_one_is_identity() {
        let a = Matrix::from_rows(&[[0.3, -2.0], [1.0, 4.0]]).unwrap();
        assert_eq!(matrix_power(&a, 1.0).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn identity_exponent_scales() {
        let p = matrix_power(&Matrix::<f64>::identity(2), 5.0).unwrap();
        assert!(rel_err(&p, &Matrix::identity(2).scale(5.0)) < 1e-14);
    }

    #[test]
    fn diagonal_matches_series() {
        let a = Matrix::diag(&[1.0, 2.0]);
        let got = matrix_power(&a, 2.0).unwrap();
        let oracle = series_oracle(&a.scale(2f64.ln()));
        assert!(rel_err(&got, &oracle) < 1e-12);
        assert!((got[(0, 0)] - 2.0).abs() < 1e-13 && (got[(1, 1)] - 4.0).abs() < 1e-13);
    }

    #[test]
    fn jordan_block_matches_series() {
        let a = Matrix::from_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        let got = matrix_power(&a, std::f64::consts::E).unwrap();
        let oracle = series_oracle(&a);
        assert!(rel_err(&got, &oracle) < 1e-12);
        let e = std::f64::consts::E;
        assert!((got[(0, 1)] - e).abs() < 1e-13 && (got[(0, 0)] - e).abs() < 1e-13);
    }

    #[test]
    fn large_norm_uses_squaring() {
        // exp of a rotation generator scaled up: closed form cos/sin.
        let t: f64 = 37.0;
        let a = Matrix::from_rows(&[[0.0, -t], [t, 0.0]]).unwrap();
        let r = expm(&a).unwrap();
        assert!((r[(0, 0)] - t.cos()).abs() < 1e-12);
        assert!((r[(1, 0)] - t.sin()).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let a = Matrix::<f64>::identity(2);
        assert!(matches!(matrix_power(&a, 0.0), Err(Error::Domain(_))));
        assert!(matches!(matrix_power(&a, -1.0), Err(Error::Domain(_))));
        let r = Matrix::<f64>::zeros(2, 3);
        assert!(matches!(matrix_power(&r, 2.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn single_precision_path() {
        let a = Matrix::<f32>::diag(&[1.0, 2.0]);
        let p = matrix_power(&a, 2.0f32).unwrap();
        assert!((p[(1, 1)] - 4.0).abs() < 1e-5);
    }
}
