use ossf::matcalc::{det, eigen_real_parts, matrix_power, Matrix};
use proptest::prelude::*;

fn square(max_dim: usize) -> impl Strategy<Value = Matrix<f64>> {
    (1..=max_dim).prop_flat_map(|n| {
        prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| Matrix::new(n, n, v).unwrap())
    })
}

fn rel(a: &Matrix<f64>, b: &Matrix<f64>) -> f64 {
    (a - b).max_abs() / (1.0 + b.max_abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn group_property(a in square(8), c1 in 0.1f64..10.0, c2 in 0.1f64..10.0) {
        let p12 = matrix_power(&a, c1 * c2).unwrap();
        let prod = &matrix_power(&a, c1).unwrap() * &matrix_power(&a, c2).unwrap();
        prop_assert!((&p12 - &prod).norm_1() <= 1e-8 * (1.0 + p12.norm_1()));
    }

    #[test]
    fn inverse_power(a in square(8), c in 0.1f64..10.0) {
        let prod = &matrix_power(&a, c).unwrap() * &matrix_power(&a, 1.0 / c).unwrap();
        prop_assert!(rel(&prod, &Matrix::identity(a.rows())) < 1e-8);
    }

    #[test]
    fn trace_consistency(a in square(16)) {
        let s = eigen_real_parts(&a, 1e-6).unwrap();
        prop_assert_eq!(s.groups().iter().map(|g| g.1).sum::<usize>(), a.rows());
        prop_assert!((s.weighted_sum() - a.trace()).abs() < 1e-8);
        let re = s.real_parts();
        prop_assert!(re.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn determinant_identity(a in square(8), c in 0.1f64..10.0) {
        let d = det(&matrix_power(&a, c).unwrap()).unwrap();
        let want = c.powf(a.trace());
        prop_assert!((d - want).abs() <= 1e-8 * want);
    }
}
