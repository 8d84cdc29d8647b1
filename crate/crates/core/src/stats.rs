//! Small statistics helpers shared by the estimators.

/// Ordinary least squares fit of `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    pub r_squared: f64,
}

pub fn ols(x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (slope * a + intercept);
            r * r
        })
        .sum();
    let stderr = if n > 2 {
        (sse / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Some(LineFit {
        slope,
        intercept,
        stderr,
        r_squared,
    })
}

/// Common-slope fit with a separate intercept per group label. The reported
/// intercept is that of the first group; `r_squared` is the within-group one.
pub fn ols_grouped(group: &[usize], x: &[f64], y: &[f64]) -> Option<LineFit> {
    let n = x.len();
    if n != y.len() || n != group.len() {
        return None;
    }
    let labels = {
        let mut l = group.to_vec();
        l.sort_unstable();
        l.dedup();
        l
    };
    let mut means = Vec::with_capacity(labels.len());
    for &g in &labels {
        let idx: Vec<usize> = (0..n).filter(|&i| group[i] == g).collect();
        let k = idx.len() as f64;
        let mx = idx.iter().map(|&i| x[i]).sum::<f64>() / k;
        let my = idx.iter().map(|&i| y[i]).sum::<f64>() / k;
        means.push((g, mx, my));
    }
    let mean_of = |g: usize| means.iter().find(|m| m.0 == g).map(|m| (m.1, m.2)).unwrap();
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (mx, my) = mean_of(group[i]);
        let (dx, dy) = (x[i] - mx, y[i] - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let sse = (syy - slope * sxy).max(0.0);
    let dof = n as f64 - labels.len() as f64 - 1.0;
    let stderr = if dof > 0.0 { (sse / dof / sxx).sqrt() } else { 0.0 };
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let (mx, my) = mean_of(group[0]);
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        stderr,
        r_squared,
    })
}

/// Sample mean and unbiased variance.
pub fn mean_var(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, var)
}
