use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RandomStream;

/// Least-squares fit of `T = coefficient * n^exponent` in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub coefficient: f64,
    /// Sum of squared residuals of `ln T`.
    pub residual: f64,
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("a power-law fit needs at least two points".into()));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidInput(format!("non-positive point ({x}, {y})")));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all abscissae are equal".into()));
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    Ok(PowerLawFit {
        exponent: slope,
        coefficient: intercept.exp(),
        residual,
    })
}

/// Mean one-step decrease `X_t - X_{t+1}`.
pub fn empirical_drift(pairs: &[(f64, f64)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidInput("no drift samples".into()));
    }
    Ok(pairs.iter().map(|(a, b)| a - b).sum::<f64>() / pairs.len() as f64)
}

/// Buckets with fewer samples than this are flagged unreliable.
pub const MIN_RELIABLE_BUCKET: usize = 100;

/// Drift estimate conditioned on one value of `X_t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftBucket {
    pub x: u64,
    pub count: usize,
    pub mean: f64,
    /// Standard error of the mean (sample standard deviation over `sqrt(count)`).
    pub std_err: f64,
    pub reliable: bool,
}

/// Groups `(X_t, X_{t+1})` pairs by `X_t` and estimates the drift in each group.
pub fn drift_by_bucket(pairs: &[(u64, u64)]) -> Vec<DriftBucket> {
    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for &(a, b) in pairs {
        groups.entry(a).or_default().push(a as f64 - b as f64);
    }
    groups
        .into_iter()
        .map(|(x, deltas)| {
            let count = deltas.len();
            let mean = deltas.iter().sum::<f64>() / count as f64;
            let std_err = if count > 1 {
                let var = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                f64::INFINITY
            };
            DriftBucket {
                x,
                count,
                mean,
                std_err,
                reliable: count >= MIN_RELIABLE_BUCKET,
            }
        })
        .collect()
}

/// Total-variation distance `(1/2) sum |a_j - b_j|`.
pub fn tv_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "supports differ in size ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    for (name, pmf) in [("first", a), ("second", b)] {
        let s: f64 = pmf.iter().sum();
        if (s - 1.0).abs() > 1e-9 || pmf.iter().any(|&p| p < 0.0) {
            return Err(Error::InvalidInput(format!("{name} pmf is not a distribution (sum {s})")));
        }
    }
    Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

/// Longest run of consecutive sizes in `1..=n` held by no job.
pub fn max_zero_run(sizes: &[u64], n: u64) -> Result<usize> {
    let mut seen = vec![false; n as usize];
    for &p in sizes {
        if p < 1 || p > n {
            return Err(Error::OutOfRange { value: p as f64, lo: 1.0, hi: n as f64 });
        }
        seen[p as usize - 1] = true;
    }
    let (mut best, mut run) = (0, 0);
    for &s in &seen {
        run = if s { 0 } else { run + 1 };
        best = best.max(run);
    }
    Ok(best)
}

/// The gap statistic in the usual convention: a run of `r >= 1` empty
/// sizes is a gap of size `r - 1`; no empty size at all means no gap.
pub fn gap_statistic(zero_run: usize) -> Option<usize> {
    zero_run.checked_sub(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Mean, median and a 95% percentile-bootstrap interval for the mean.
pub fn summarize(samples: &[f64], bootstrap_reps: usize, rng: &mut RandomStream) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("cannot summarise an empty sample".into()));
    }
    if bootstrap_reps == 0 {
        return Err(Error::InvalidInput("need at least one bootstrap replicate".into()));
    }
    let m = samples.len();
    let mean = samples.iter().sum::<f64>() / m as f64;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = quantile(&sorted, 0.5);
    let mut means: Vec<f64> = (0..bootstrap_reps)
        .map(|_| (0..m).map(|_| samples[rng.index(m)]).sum::<f64>() / m as f64)
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(Summary {
        mean,
        median,
        ci_low: quantile(&means, 0.025),
        ci_high: quantile(&means, 0.975),
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
    }
}
