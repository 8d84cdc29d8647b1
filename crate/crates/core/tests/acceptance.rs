//! Acceptance criteria, run single-threaded. Each criterion prints one
//! PASS/FAIL line; the process exits non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ossf::anisotropy::decompose;
use ossf::cli::verify::{geometry_families, polar_sweep, random_pair};
use ossf::cli::{self, Suite};
use ossf::estimation::{covariance_scaling_check, graph_dimension_estimate, holder_exponent, Synthesizer};
use ossf::exponents::{validate_and_normalize, verify_integral_i, verify_integral_j, Representation, ScalingPair};
use ossf::matcalc::{Matrix, DEFAULT_GROUP_TOL};
use ossf::synthesis::{FrequencySpec, GridSpec, HarmonizableField};
use ossf::Result;

const SEED: u64 = 0;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn pair(e: Matrix<f64>, d: Matrix<f64>) -> Result<ScalingPair<f64>> {
    validate_and_normalize(&e, &d, Representation::Harmonizable)
}

fn within_limit(elapsed: Duration, limit_s: f64) -> bool {
    elapsed.as_secs_f64() < limit_s
}

/// `lo < v ≤ hi` up to `tol`.
fn in_half_open(v: f64, lo: f64, hi: f64, tol: f64) -> bool {
    v > lo - tol && v <= hi + tol
}

fn formula_equivalence() -> Result<Outcome> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst, mut violations) = (0.0f64, 0usize);
    for _ in 0..10_000 {
        let p = random_pair(&mut rng)?;
        let min_form = p.dim_graph();
        let case_form = p.dim_case_form();
        worst = worst
            .max((min_form.range_dim - case_form.range_dim).abs())
            .max((min_form.graph_dim - case_form.graph_dim).abs());
        let (zeta, kappa) = p.profile().case_intervals(&case_form);
        if let Some((lo, hi)) = zeta {
            violations += !in_half_open(case_form.range_dim, lo, hi, 1e-12) as usize;
        }
        if let Some((lo, hi)) = kappa {
            violations += !in_half_open(case_form.graph_dim, lo, hi, 1e-12) as usize;
        }
    }
    let t = start.elapsed();
    outcome(
        worst <= 1e-12 && violations == 0 && within_limit(t, 10.0),
        format!(
            "10^4 configurations, max deviation {worst:.1e}, interval violations {violations}, {:.2} s",
            t.as_secs_f64()
        ),
    )
}

/// Isotropic dimensions by direct arithmetic: range
/// `min{m, min_j (d + Σ_{i≤j}(λ_j − λ_i))/λ_j}`, graph equal to the range when
/// `d ≤ Σλ` and `d + Σ(1 − λ_i)` otherwise.
fn hand_oracle(d: usize, lambda: &[f64]) -> (f64, f64) {
    let m = lambda.len();
    let mut range = m as f64;
    for j in 0..m {
        let mut num = d as f64;
        for i in 0..=j {
            num += lambda[j] - lambda[i];
        }
        range = range.min(num / lambda[j]);
    }
    let total: f64 = lambda.iter().sum();
    let graph = if (d as f64) <= total {
        range
    } else {
        let mut g = d as f64;
        for l in lambda {
            g += 1.0 - l;
        }
        g
    };
    (range, graph)
}

fn isotropic_reduction() -> Result<Outcome> {
    let cases: [(usize, &[f64], f64, f64); 3] =
        [(2, &[0.5, 0.7], 2.0, 2.8), (1, &[0.5], 1.0, 1.5), (1, &[0.4, 0.4], 2.0, 2.2)];
    let mut ok = true;
    let mut lines = Vec::new();
    for (d, lambda, range, graph) in cases {
        let p = pair(Matrix::identity(d), Matrix::diag(lambda))?;
        let rep = p.dim_graph();
        let (or, og) = hand_oracle(d, lambda);
        ok &= (rep.range_dim - or).abs() < 1e-12 && (rep.graph_dim - og).abs() < 1e-12;
        ok &= (rep.range_dim - range).abs() < 1e-12 && (rep.graph_dim - graph).abs() < 1e-12;
        lines.push(format!("d={d} λ={lambda:?} range {} graph {}", rep.range_dim, rep.graph_dim));
    }
    outcome(ok, lines.join("; "))
}

fn rescaling_invariance() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut failures = 0;
    for _ in 0..1000 {
        let p = random_pair(&mut rng)?;
        let h = rng.random_range(0.3..=3.0);
        failures += !p.rescaling_invariance_check(h)? as usize;
    }
    outcome(failures == 0, format!("1000 pairs, {failures} changed"))
}

fn polar_geometry() -> Result<Outcome> {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, (name, e)) in geometry_families().into_iter().enumerate() {
        let dec = decompose(&e, DEFAULT_GROUP_TOL)?;
        let (hom, rec, dir) = polar_sweep(&dec, 1000, SEED + 10 + i as u64)?;
        ok &= hom < 1e-6 && rec < 1e-8 && dir < 1e-8;
        lines.push(format!("{name}: {hom:.1e}/{rec:.1e}/{dir:.1e}"));
    }
    let t = start.elapsed();
    outcome(
        ok && within_limit(t, 30.0),
        format!("homogeneity/reconstruction/direction {}; {:.2} s", lines.join(", "), t.as_secs_f64()),
    )
}

fn subspace_slopes() -> Result<Outcome> {
    let families = [
        ("diag(1.2,1.8)", Matrix::diag(&[1.2, 1.8])),
        ("jordan(1.5)", Matrix::from_rows(&[[1.5, 0.5], [0.0, 1.5]])?),
        ("rotation(1.4±0.6i)", Matrix::from_rows(&[[1.4, -0.6], [0.6, 1.4]])?),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (name, e) in families {
        let dec = decompose(&e, DEFAULT_GROUP_TOL)?;
        for (k, s) in dec.subspaces().iter().enumerate() {
            let fit = dec.subspace_exponent_fit(k + 1, 64)?;
            let target = 1.0 / s.real_part;
            ok &= (fit.slope - target).abs() <= 0.05;
            lines.push(format!("{name} W_{}: {:.4} vs {:.4}", k + 1, fit.slope, target));
        }
    }
    outcome(ok, lines.join(", "))
}

fn covariance_scaling() -> Result<Outcome> {
    let start = Instant::now();
    let cases = [Matrix::diag(&[0.5]), Matrix::from_rows(&[[0.5, 1.0], [0.0, 0.5]])?];
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (i, d) in cases.into_iter().enumerate() {
        let m = d.rows();
        let p = pair(Matrix::identity(1), d)?;
        let field = HarmonizableField::new(&p, FrequencySpec::default())?;
        let rep = covariance_scaling_check(
            &p,
            Synthesizer::Harmonizable(&field),
            &[vec![0.25], vec![0.5], vec![1.0]],
            &[0.5, 2.0],
            20_000,
            SEED + 100 * i as u64,
        )?;
        worst = worst.max(rep.max_relative_error);
        lines.push(format!("m={m}: {:.4}", rep.max_relative_error));
    }
    let t = start.elapsed();
    outcome(
        worst < 0.10 && within_limit(t, 120.0),
        format!("N = 2e4, c ∈ {{0.5, 2}}, max relative error {}; {:.1} s", lines.join(", "), t.as_secs_f64()),
    )
}

fn graph_dimension() -> Result<Outcome> {
    let cases: [(&str, Matrix<f64>, f64, Vec<usize>, f64, f64); 3] = [
        ("d=1 λ=0.5", Matrix::identity(1), 0.5, vec![1 << 14], 1.5, 0.15),
        ("d=1 λ=0.8", Matrix::identity(1), 0.8, vec![1 << 14], 1.2, 0.15),
        ("d=2 a=(1.2,1.8) λ=0.6", Matrix::diag(&[1.2, 1.8]), 0.6, vec![256, 256], 2.8333, 0.25),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, (name, e, lambda, n, target, tol)) in cases.into_iter().enumerate() {
        let start = Instant::now();
        let p = pair(e, Matrix::diag(&[lambda]))?;
        let grid = GridSpec::new(n)?;
        let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &grid)?)?;
        let sample = field.sample_grid(&grid, SEED + 200 + i as u64)?;
        let est = graph_dimension_estimate(&sample)?.fit.slope;
        let t = start.elapsed();
        let case_ok = (est - target).abs() <= tol && within_limit(t, 300.0);
        ok &= case_ok;
        lines.push(format!(
            "{name}: {est:.4} (target {target} ± {tol}, formula {:.4}, {:.1} s){}",
            p.dim_graph().graph_dim,
            t.as_secs_f64(),
            if case_ok { "" } else { " OUT" }
        ));
    }
    outcome(ok, lines.join("; "))
}

fn holder_recovery() -> Result<Outcome> {
    let cases: [(Vec<f64>, f64); 4] =
        [(vec![0.3], 0.05), (vec![0.5], 0.05), (vec![0.7], 0.05), (vec![0.4, 0.8], 0.07)];
    let mut ok = true;
    let mut lines = Vec::new();
    for (i, (d, tol)) in cases.into_iter().enumerate() {
        let p = pair(Matrix::identity(1), Matrix::diag(&d))?;
        let grid = GridSpec::new(vec![1 << 14])?;
        let field = HarmonizableField::new(&p, FrequencySpec::covering(&p, &grid)?)?;
        let sample = field.sample_grid(&grid, SEED + 300 + i as u64)?;
        let dec = decompose(p.raw_e(), DEFAULT_GROUP_TOL)?;
        for (j, &lambda) in d.iter().enumerate() {
            let fitted = holder_exponent(&sample, &p, &dec, j)?.fitted_exponent;
            ok &= (fitted - lambda).abs() <= tol;
            lines.push(format!("D={d:?} X{}: {fitted:.4} vs {lambda}", j + 1));
        }
    }
    outcome(ok, lines.join(", "))
}

fn integral_bounds() -> Result<Outcome> {
    let start = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    let i_cases = [
        (0.5, 0.6, 2.0, 1.0, 1),
        (0.5, 0.6, 5.0 / 3.0, 1.0, 1),
        (0.5, 0.6, 1.0, 1.0, 1),
        (0.4, 0.7, 6.0, 1.0, 2),
    ];
    for (h, delta, p, m, n) in i_cases {
        let r = verify_integral_i(h, delta, p, m, n)?;
        ok &= r.bound_ok;
        lines.push(format!("I(h={h}, δ={delta}, p={p:.4}, n={n}) {}", r.bound_ok));
    }
    let j_cases = [(2.0, 1.0, 0.5, 1), (1.0, 1.0, 0.5, 1), (1.0, 0.5, 0.4, 1), (1.0, 0.5, 0.2, 2)];
    let mut regimes = Vec::new();
    for (alpha, beta, eta, n) in j_cases {
        let r = verify_integral_j(alpha, beta, eta, n)?;
        ok &= r.bound_ok;
        regimes.push(format!("{:?}", r.regime));
        lines.push(format!("J(α={alpha}, β={beta}, η={eta}, n={n}) {:?} {}", r.regime, r.bound_ok));
    }
    regimes.sort();
    regimes.dedup();
    let t = start.elapsed();
    outcome(
        ok && regimes.len() == 3 && within_limit(t, 30.0),
        format!("{}; {:.2} s", lines.join(", "), t.as_secs_f64()),
    )
}

fn determinism() -> Result<Outcome> {
    let dir = tempfile::tempdir()?;
    let config = dir.path().join("run.json");
    std::fs::write(
        &config,
        r#"{"E": [[1.2, 0.0], [0.0, 1.8]], "D": [[0.6]], "representation": "harmonizable",
            "grid": {"points_per_axis": [33, 33]}, "seed": 11}"#,
    )?;
    let mut identical_files = true;
    for binary in [false, true] {
        let mut bytes = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("field_{binary}_{run}"));
            let mut cmd = Command::new(env!("CARGO_BIN_EXE_ossf"));
            cmd.args(["--threads", "1", "simulate", "-c"]).arg(&config).arg("-o").arg(&out);
            if binary {
                cmd.arg("--binary");
            }
            let run = cmd.output()?;
            if !run.status.success() {
                return outcome(false, format!("simulate exited with {}", run.status));
            }
            bytes.push(std::fs::read(&out)?);
        }
        identical_files &= bytes[0] == bytes[1];
    }
    let summary = |r: Vec<cli::CheckResult>| -> Vec<(&'static str, String, bool, String)> {
        r.into_iter().map(|c| (c.suite, c.name, c.passed, c.detail)).collect()
    };
    let a = summary(cli::verify(Suite::All, SEED, false).2);
    let b = summary(cli::verify(Suite::All, SEED, false).2);
    let passed = a.iter().filter(|c| c.2).count();
    let identical_verify = a == b;
    outcome(
        identical_files && identical_verify,
        format!(
            "simulate CSV and binary byte-identical: {identical_files}; verify repeat identical: {identical_verify} ({passed}/{} passed each run)",
            a.len()
        ),
    )
}

fn main() -> ExitCode {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build_global()
        .expect("global pool is configured once");
    let criteria: [(&str, fn() -> Result<Outcome>); 10] = [
        ("formula equivalence", formula_equivalence),
        ("isotropic reduction", isotropic_reduction),
        ("rescaling invariance", rescaling_invariance),
        ("polar geometry", polar_geometry),
        ("subspace slopes", subspace_slopes),
        ("covariance scaling", covariance_scaling),
        ("graph dimension", graph_dimension),
        ("holder recovery", holder_recovery),
        ("integral bounds", integral_bounds),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += !passed as usize;
        println!("{} criterion {} {name}: {detail}", if passed { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
