use ossf::exponents::{validate_and_normalize, Representation, ScalingPair};
use ossf::matcalc::Matrix;
use ossf::synthesis::{FrequencySpec, GridSpec, HarmonizableField, MovingAverageField, Truncation};

fn pair(e: Matrix<f64>, d: Matrix<f64>, rep: Representation) -> ScalingPair<f64> {
    validate_and_normalize(&e, &d, rep).unwrap()
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn harmonizable_sample_covariance_matches_discrete_covariance() {
    let p = pair(
        Matrix::identity(1),
        Matrix::from_rows(&[[0.5, 1.0], [0.0, 0.5]]).unwrap(),
        Representation::Harmonizable,
    );
    let field = HarmonizableField::new(&p, FrequencySpec::default()).unwrap();
    let (x, y) = ([0.4], [0.9]);
    let n = 20_000;
    let draws = field.sample_points(&[x.to_vec(), y.to_vec()], 0..n).unwrap();
    let exact = field.covariance(&x, &y).unwrap();
    let mut emp = [0.0; 4];
    for row in &draws {
        for i in 0..2 {
            for j in 0..2 {
                emp[i * 2 + j] += row[i] * row[2 + j] / n as f64;
            }
        }
    }
    let e = exact.as_slice();
    let diff: f64 = emp.iter().zip(e).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(diff / norm < 0.05, "relative error {}", diff / norm);
}

#[test]
fn grid_samples_are_thread_count_independent() {
    let p = pair(Matrix::diag(&[1.2, 1.8]), Matrix::diag(&[0.6]), Representation::Harmonizable);
    let grid = GridSpec::new(vec![33, 33]).unwrap();
    let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &grid).unwrap()).unwrap();
    let a = in_pool(1, || field.sample_grid(&grid, 17).unwrap());
    let b = in_pool(3, || field.sample_grid(&grid, 17).unwrap());
    let c = field.sample_grid(&grid, 18).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.values, c.values);
    assert!(a.value(0).iter().all(|&v| v == 0.0));
}

#[test]
fn moving_average_is_pinned_and_deterministic() {
    let p = pair(Matrix::identity(1), Matrix::diag(&[0.3, 0.7]), Representation::MovingAverage);
    let grid = GridSpec::new(vec![33]).unwrap();
    let field = MovingAverageField::new(&p, &grid, Truncation::default()).unwrap();
    let a = in_pool(1, || field.sample_grid(4).unwrap());
    let b = in_pool(4, || field.sample_grid(4).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.value(0), &[0.0, 0.0]);
    assert!(a.values.iter().all(|v| v.is_finite()));
}

#[test]
fn moving_average_increments_are_stationary() {
    // D = 0.5 with E = 1 is improper as a moving average.
    let p = pair(Matrix::identity(1), Matrix::diag(&[0.4]), Representation::MovingAverage);
    let grid = GridSpec::new(vec![17]).unwrap();
    let field = MovingAverageField::new(&p, &grid, Truncation::default()).unwrap();
    let n = 10_000;
    let draws = field.sample_nodes(&[0, 4, 8, 12], 0..n).unwrap();
    let var = |i: usize, j: usize| draws.iter().map(|r| (r[j] - r[i]).powi(2)).sum::<f64>() / n as f64;
    let (v0, v1, v2) = (var(0, 1), var(1, 2), var(2, 3));
    for v in [v1, v2] {
        assert!((v - v0).abs() / v0 < 0.08, "{v0} vs {v}");
    }
}

#[test]
fn marginals_have_gaussian_moments() {
    let p = pair(Matrix::identity(1), Matrix::diag(&[0.5]), Representation::Harmonizable);
    let field = HarmonizableField::new(&p, FrequencySpec::default()).unwrap();
    let n = 20_000;
    let v: Vec<f64> = field.sample_points(&[vec![0.6]], 0..n).unwrap().iter().map(|r| r[0]).collect();
    let m2 = v.iter().map(|x| x * x).sum::<f64>() / n as f64;
    let m4 = v.iter().map(|x| x.powi(4)).sum::<f64>() / n as f64;
    let mean = v.iter().sum::<f64>() / n as f64;
    assert!(mean.abs() < 4.0 * (m2 / n as f64).sqrt());
    assert!((m4 / (m2 * m2) - 3.0).abs() < 0.2, "kurtosis {}", m4 / (m2 * m2));
}

#[test]
fn oversized_moving_average_is_refused_before_allocation() {
    let p = pair(Matrix::identity(2), Matrix::diag(&[0.5]), Representation::MovingAverage);
    let grid = GridSpec::new(vec![256, 256]).unwrap();
    assert!(MovingAverageField::new(&p, &grid, Truncation::default()).is_err());
}
