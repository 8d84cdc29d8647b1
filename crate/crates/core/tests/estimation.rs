use ossf::anisotropy::decompose;
use ossf::estimation::{graph_dimension_estimate, holder_exponent, range_dimension_estimate};
use ossf::exponents::{validate_and_normalize, Representation};
use ossf::matcalc::{Matrix, DEFAULT_GROUP_TOL};
use ossf::synthesis::{FrequencySpec, GridSpec, HarmonizableField};

#[test]
fn sup_ratio_is_stable_under_refinement() {
    let p = validate_and_normalize(&Matrix::identity(1), &Matrix::diag(&[0.7]), Representation::Harmonizable).unwrap();
    let fine = GridSpec::new(vec![4097]).unwrap();
    let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &fine).unwrap()).unwrap();
    let dec = decompose(p.raw_e(), DEFAULT_GROUP_TOL).unwrap();
    let coarse = field.sample_grid(&GridSpec::new(vec![1025]).unwrap(), 8).unwrap();
    let a = holder_exponent(&coarse, &p, &dec, 0).unwrap();
    let b = holder_exponent(&field.sample_grid(&fine, 8).unwrap(), &p, &dec, 0).unwrap();
    assert!(a.max_ratio.is_finite() && b.max_ratio.is_finite());
    assert!(b.max_ratio <= 2.0 * a.max_ratio, "{} → {}", a.max_ratio, b.max_ratio);
    assert!(b.fitted_exponent > 0.0 && b.fitted_exponent <= 1.0);
}

#[test]
fn graph_estimate_dominates_range_estimate() {
    let p = validate_and_normalize(
        &Matrix::identity(1),
        &Matrix::diag(&[0.5, 0.6]),
        Representation::Harmonizable,
    )
    .unwrap();
    let grid = GridSpec::new(vec![1 << 14]).unwrap();
    let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &grid).unwrap()).unwrap();
    let s = field.sample_grid(&grid, 2).unwrap();
    let g = graph_dimension_estimate(&s).unwrap().fit;
    let r = range_dimension_estimate(&s).unwrap().fit;
    assert!(g.slope >= r.slope - 0.1, "graph {} range {}", g.slope, r.slope);
    assert!(r.slope <= 2.0 + 2.0 * r.stderr + 0.05);
    assert!(g.slope <= 3.0 + 2.0 * g.stderr);
}

#[test]
fn holder_refuses_jordan_d_but_synthesis_accepts_it() {
    let p = validate_and_normalize(
        &Matrix::identity(1),
        &Matrix::from_rows(&[[0.5, 1.0], [0.0, 0.5]]).unwrap(),
        Representation::Harmonizable,
    )
    .unwrap();
    let grid = GridSpec::new(vec![2048]).unwrap();
    let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &grid).unwrap()).unwrap();
    let s = field.sample_grid(&grid, 0).unwrap();
    let dec = decompose(p.raw_e(), DEFAULT_GROUP_TOL).unwrap();
    assert!(holder_exponent(&s, &p, &dec, 0).is_err());
}
