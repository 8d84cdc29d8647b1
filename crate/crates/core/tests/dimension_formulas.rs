use ossf::exponents::{
    in_half_open, validate_and_normalize, GraphCase, RangeCase, Representation, SpectralProfile,
};
use ossf::matcalc::Matrix;
use ossf::Rational;
use proptest::prelude::*;

/// Normalized rational profile: λ ∈ (0, 1) sorted, a ∈ (1, 4) strictly
/// increasing, dimensions up to 6 in total.
fn rational_profile() -> impl Strategy<Value = SpectralProfile<Rational>> {
    let lambda = prop::collection::vec(1i128..100, 1..=6).prop_map(|mut v| {
        v.sort();
        v.into_iter().map(|n| Rational::new(n, 100)).collect::<Vec<_>>()
    });
    let groups = prop::collection::vec((101i128..400, 1usize..=3), 1..=4).prop_map(|mut g| {
        g.sort();
        g.dedup_by_key(|x| x.0);
        let mut total = 0;
        g.into_iter()
            .filter_map(|(a, k)| {
                let k = k.min(6 - total);
                total += k;
                (k > 0).then(|| (Rational::new(a, 100), k))
            })
            .collect::<Vec<_>>()
    });
    (groups, lambda).prop_map(|(a, l)| SpectralProfile::new(a, l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn case_form_matches_min_form_exactly(p in rational_profile()) {
        let min = p.min_form();
        let case = p.case_form();
        prop_assert_eq!(min.range_dim, case.range_dim);
        prop_assert_eq!(min.graph_dim, case.graph_dim);
        let zero = Rational::from_integer(0);
        let (r, g) = p.case_intervals(&case);
        if let Some((lo, hi)) = r {
            prop_assert!(in_half_open(&case.range_dim, &lo, &hi, &zero));
        }
        if let Some((lo, hi)) = g {
            prop_assert!(in_half_open(&case.graph_dim, &lo, &hi, &zero));
        }
    }

    #[test]
    fn ordering_and_bounds(p in rational_profile()) {
        let rep = p.min_form();
        let m = Rational::from_integer(p.m() as i128);
        let dm = Rational::from_integer((p.d() + p.m()) as i128);
        prop_assert!(rep.range_dim > Rational::from_integer(0));
        prop_assert!(rep.range_dim <= m && rep.range_dim <= rep.graph_dim);
        prop_assert!(rep.graph_dim <= dm);
        if p.q() <= p.lambda_sum() {
            prop_assert_eq!(rep.graph_dim, rep.range_dim);
            prop_assert_eq!(rep.graph_case, GraphCase::RangeDominated);
        } else {
            prop_assert_eq!(rep.range_case, RangeCase::Full);
        }
    }

    #[test]
    fn range_dimension_decreases_in_lambda(p in rational_profile(), j in 0usize..6, bump in 1i128..20) {
        let j = j % p.m();
        let mut lambda = p.lambda.clone();
        lambda[j] += Rational::new(bump, 1000);
        lambda.sort();
        if *lambda.last().unwrap() < Rational::from_integer(1) {
            let bumped = SpectralProfile::new(p.a.clone(), lambda);
            prop_assert!(bumped.dim_range() <= p.dim_range());
        }
    }

    #[test]
    fn rescaling_is_exact(p in rational_profile(), num in 3i128..30, den in 1i128..10) {
        let h = Rational::new(num, den);
        let a = p.min_form();
        let b = p.rescaled(h).min_form();
        prop_assert_eq!(a.range_dim, b.range_dim);
        prop_assert_eq!(a.graph_dim, b.graph_dim);
    }
}

/// The isotropic special case written out independently: range
/// `min{m, (d + Σ_{i≤j}(λ_j − λ_i))/λ_j}`, graph equal to the range when
/// `d ≤ Σλ` and `d + Σ(1 − λ_i)` otherwise.
fn isotropic_oracle(d: f64, lambda: &[f64]) -> (f64, f64) {
    let m = lambda.len() as f64;
    let mut range = m;
    for j in 0..lambda.len() {
        let mut s = d;
        for i in 0..=j {
            s += lambda[j] - lambda[i];
        }
        range = range.min(s / lambda[j]);
    }
    let total: f64 = lambda.iter().sum();
    let graph = if d <= total {
        range
    } else {
        d + lambda.iter().map(|l| 1.0 - l).sum::<f64>()
    };
    (range, graph)
}

#[test]
fn isotropic_reduction() {
    let cases: [(usize, &[f64], f64, f64); 3] = [
        (2, &[0.5, 0.7], 2.0, 2.8),
        (1, &[0.5], 1.0, 1.5),
        (1, &[0.4, 0.4], 2.0, 2.2),
    ];
    for (d, lambda, range, graph) in cases {
        let pair = validate_and_normalize(
            &Matrix::identity(d),
            &Matrix::diag(lambda),
            Representation::Harmonizable,
        )
        .unwrap();
        let rep = pair.dim_graph();
        let (or, og) = isotropic_oracle(d as f64, lambda);
        assert!((rep.range_dim - or).abs() < 1e-12 && (rep.range_dim - range).abs() < 1e-12);
        assert!((rep.graph_dim - og).abs() < 1e-12 && (rep.graph_dim - graph).abs() < 1e-12);
    }
}

#[test]
fn isotropic_reduction_sweep() {
    let mut state = 17u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64) / (1u64 << 53) as f64
    };
    for _ in 0..500 {
        let d = 1 + (next() * 4.0) as usize;
        let m = 1 + (next() * 4.0) as usize;
        let mut lambda: Vec<f64> = (0..m).map(|_| 0.05 + 0.9 * next()).collect();
        lambda.sort_by(f64::total_cmp);
        let pair = validate_and_normalize(
            &Matrix::identity(d),
            &Matrix::diag(&lambda),
            Representation::Harmonizable,
        )
        .unwrap();
        let rep = pair.dim_graph();
        let (or, og) = isotropic_oracle(d as f64, &lambda);
        assert!((rep.range_dim - or).abs() < 1e-12, "{lambda:?}");
        assert!((rep.graph_dim - og).abs() < 1e-12, "{lambda:?}");
    }
}
