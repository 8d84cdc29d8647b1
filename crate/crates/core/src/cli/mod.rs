//! The `ossf` command pipelines, kept in the library so they can be tested
//! without spawning the binary.

mod config;
pub mod format;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

pub use config::RunConfig;
pub use verify::{CheckResult, Suite};

use crate::anisotropy::decompose;
use crate::error::{Error, Result};
use crate::estimation::{
    graph_dimension_estimate, holder_exponent, range_dimension_estimate, BoxCountCurve,
};
use crate::exponents::{validate_and_normalize, Candidate, GraphCase, RangeCase};
use crate::matcalc::{eigenvalues, Matrix, DEFAULT_GROUP_TOL};
use crate::synthesis::FieldSample;

#[derive(Debug, Serialize)]
struct SubspaceSummary {
    real_part: f64,
    dim: usize,
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    config: RunConfig,
    eigenvalues_e: Vec<(f64, f64)>,
    eigenvalues_d: Vec<(f64, f64)>,
    normalization_h: f64,
    q: f64,
    a: Vec<(f64, usize)>,
    lambda: Vec<f64>,
    subspaces: Vec<SubspaceSummary>,
    scaling_condition: bool,
    proper: bool,
    trace_consistent: bool,
    range_dim: f64,
    graph_dim: f64,
    range_case: RangeCase,
    graph_case: GraphCase,
    candidates: Vec<Candidate<f64>>,
}

pub fn analyze_report(cfg: &RunConfig) -> Result<AnalyzeReport> {
    let pair = cfg.pair()?;
    let config = cfg.resolved()?;
    let dec = decompose(pair.e(), DEFAULT_GROUP_TOL)?;
    let rep = pair.dim_graph();
    let sorted = |m: &Matrix<f64>| -> Result<Vec<(f64, f64)>> {
        let mut v = eigenvalues(m)?;
        v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
        Ok(v)
    };
    Ok(AnalyzeReport {
        config,
        eigenvalues_e: sorted(pair.raw_e())?,
        eigenvalues_d: sorted(pair.raw_d())?,
        normalization_h: pair.h(),
        q: pair.q(),
        a: pair.a().groups().to_vec(),
        lambda: pair.lambda().to_vec(),
        subspaces: dec
            .subspaces()
            .iter()
            .map(|s| SubspaceSummary { real_part: s.real_part, dim: s.dim() })
            .collect(),
        // Both gates are enforced by validation, so a report means they hold.
        scaling_condition: true,
        proper: true,
        trace_consistent: pair.trace_consistent(),
        range_dim: rep.range_dim,
        graph_dim: rep.graph_dim,
        range_case: rep.range_case,
        graph_case: rep.graph_case,
        candidates: rep.formula_trace,
    })
}

pub fn analyze_text(r: &AnalyzeReport) -> Result<String> {
    let mut s = String::new();
    let fmt_eig = |v: &[(f64, f64)]| {
        v.iter()
            .map(|(re, im)| if *im == 0.0 { format!("{re}") } else { format!("{re}{im:+}i") })
            .collect::<Vec<_>>()
            .join(", ")
    };
    let c = &r.config;
    writeln!(s, "representation   {}", c.representation).ok();
    writeln!(s, "grid             {:?}", c.grid.points_per_axis).ok();
    writeln!(s, "seed             {}", c.seed).ok();
    if let Some(f) = &c.freq {
        writeln!(s, "freq             j_min={} j_max={} base_resolution={}", f.j_min, f.j_max, f.base_resolution).ok();
    }
    if let Some(t) = &c.truncation {
        writeln!(s, "truncation       T={} refine_levels={}", t.t, t.refine_levels).ok();
    }
    writeln!(s, "eig(E)           {}", fmt_eig(&r.eigenvalues_e)).ok();
    writeln!(s, "eig(D)           {}", fmt_eig(&r.eigenvalues_d)).ok();
    writeln!(s, "H                {}", r.normalization_h).ok();
    writeln!(s, "q = trace E/H    {}", r.q).ok();
    let a: Vec<String> = r.a.iter().map(|(v, k)| format!("{v} (×{k})")).collect();
    writeln!(s, "a                {}", a.join(", ")).ok();
    let l: Vec<String> = r.lambda.iter().map(|v| v.to_string()).collect();
    writeln!(s, "lambda           {}", l.join(", ")).ok();
    let w: Vec<String> = r
        .subspaces
        .iter()
        .map(|w| format!("dim {} at real part {}", w.dim, w.real_part))
        .collect();
    writeln!(s, "subspaces        {}", w.join("; ")).ok();
    writeln!(
        s,
        "checks           scaling condition ok, proper ok, trace consistent {}",
        r.trace_consistent
    )
    .ok();
    writeln!(s, "dim range        {}   case {:?}", r.range_dim, r.range_case).ok();
    writeln!(s, "dim graph        {}   case {:?}", r.graph_dim, r.graph_case).ok();
    writeln!(s, "candidates").ok();
    for cand in &r.candidates {
        writeln!(s, "  {:?} {:>2}  {}", cand.kind, cand.index, cand.value).ok();
    }
    Ok(s)
}

/// Synthesizes the configured field and writes it to `out`, falling back to
/// the config's `output`.
pub fn simulate(cfg: &RunConfig, out: Option<&Path>, binary: bool) -> Result<(PathBuf, FieldSample)> {
    let path = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.clone())
        .ok_or_else(|| Error::Validation("no output path: pass -o or set \"output\"".into()))?;
    let sample = cfg.simulate()?;
    format::write_field_file(&path, &sample, binary)?;
    Ok((path, sample))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateMode {
    Range,
    Graph,
    Holder,
}

impl std::str::FromStr for EstimateMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "range" => Ok(EstimateMode::Range),
            "graph" => Ok(EstimateMode::Graph),
            "holder" => Ok(EstimateMode::Holder),
            _ => Err(Error::Validation(format!(
                "unknown mode {s:?}; expected range, graph or holder"
            ))),
        }
    }
}

/// CSV report for `sample`. Comment lines starting with `#` carry the fit and,
/// when the file embeds E and D, the closed-form prediction.
pub fn estimate(sample: &FieldSample, mode: EstimateMode, component: Option<usize>) -> Result<String> {
    let pair = match &sample.meta {
        Some(meta) => Some(validate_and_normalize(
            &Matrix::from_rows(&meta.e)?,
            &Matrix::from_rows(&meta.d)?,
            meta.representation,
        )?),
        None => None,
    };
    match mode {
        EstimateMode::Range | EstimateMode::Graph => {
            let (curve, prediction) = if mode == EstimateMode::Range {
                (range_dimension_estimate(sample)?, pair.as_ref().map(|p| p.dim_range()))
            } else {
                (graph_dimension_estimate(sample)?, pair.as_ref().map(|p| p.dim_graph().graph_dim))
            };
            Ok(box_count_csv(&curve, mode, prediction))
        }
        EstimateMode::Holder => {
            let pair = pair.ok_or_else(|| {
                Error::Validation("holder mode needs the E, D metadata line of a CSV field file".into())
            })?;
            let dec = decompose(pair.raw_e(), DEFAULT_GROUP_TOL)?;
            let components: Vec<usize> = match component {
                Some(j) if j == 0 || j > sample.m => {
                    return Err(Error::Validation(format!(
                        "component {j} outside 1..={}",
                        sample.m
                    )))
                }
                Some(j) => vec![j - 1],
                None => (0..sample.m).collect(),
            };
            let mut s = String::from("# mode: holder\n");
            let mut rows = String::new();
            for j in components {
                let r = holder_exponent(sample, &pair, &dec, j)?;
                writeln!(
                    s,
                    "# component {}: fitted_exponent={:.6} stderr={:.6} r_squared={:.6} expected_exponent={:.6} max_ratio={:.6}",
                    j + 1,
                    r.fitted_exponent,
                    r.stderr,
                    r.r_squared,
                    r.expected_exponent,
                    r.max_ratio
                )
                .ok();
                for l in &r.lags {
                    writeln!(
                        rows,
                        "{},{},{},{:.16e},{:.16e},{:.16e},{},{:.16e},{:.16e}",
                        j + 1,
                        l.axis + 1,
                        l.steps,
                        l.lag,
                        l.tau,
                        l.moment,
                        l.pairs,
                        l.tau.ln(),
                        l.moment.ln()
                    )
                    .ok();
                }
            }
            s.push_str("component,axis,steps,lag,tau,moment,pairs,log_tau,log_moment\n");
            s.push_str(&rows);
            Ok(s)
        }
    }
}

fn box_count_csv(curve: &BoxCountCurve, mode: EstimateMode, prediction: Option<f64>) -> String {
    let f = &curve.fit;
    let mut s = String::new();
    let name = if mode == EstimateMode::Range { "range" } else { "graph" };
    writeln!(s, "# mode: {name}").ok();
    writeln!(
        s,
        "# fit: slope={:.6} intercept={:.6} stderr={:.6} r_squared={:.6} window={}..{}",
        f.slope, f.intercept, f.stderr, f.r_squared, f.window.0, f.window.1
    )
    .ok();
    if let Some(p) = prediction {
        writeln!(s, "# prediction: {p:.6}").ok();
    }
    let x: Vec<f64> = curve.scales.iter().map(|e| (1.0 / e).ln()).collect();
    // The predicted line passes through the centroid of the fit window.
    let (w0, w1) = f.window;
    let k = (w1 - w0 + 1) as f64;
    let cx = x[w0..=w1].iter().sum::<f64>() / k;
    let cy = curve.counts[w0..=w1].iter().map(|&c| (c as f64).ln()).sum::<f64>() / k;
    write!(s, "epsilon,count,log_inv_epsilon,log_count,fit_log_count,in_window").ok();
    if prediction.is_some() {
        write!(s, ",predicted_log_count").ok();
    }
    s.push('\n');
    for (i, (&eps, &count)) in curve.scales.iter().zip(&curve.counts).enumerate() {
        write!(
            s,
            "{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
            eps,
            count,
            x[i],
            (count as f64).ln(),
            f.intercept + f.slope * x[i],
            (w0..=w1).contains(&i) as u8
        )
        .ok();
        if let Some(p) = prediction {
            write!(s, ",{:.16e}", cy + p * (x[i] - cx)).ok();
        }
        s.push('\n');
    }
    s
}

/// Runs the suites and renders one line per check plus a summary. The flag is
/// true when every check passed.
pub fn verify(suite: Suite, seed: u64, quick: bool) -> (String, bool, Vec<CheckResult>) {
    let results = verify::run(suite, seed, quick);
    let mut s = String::new();
    for r in &results {
        writeln!(s, "{r}").ok();
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    writeln!(s, "{} checks, {} passed, {failed} failed", results.len(), results.len() - failed).ok();
    (s, failed == 0, results)
}
