use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::trial::{run_trial, TrialRecord};
use crate::error::{Error, Result};
use crate::oracle::{fit_power_law, summarize, PowerLawFit, Summary};
use crate::rng::{mix_seed, RandomStream};

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "DYNSCHED_THREADS";

/// Default parallelism: `DYNSCHED_THREADS` if set, else the number of CPUs.
pub fn default_parallelism() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&v| v > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn default_reps() -> usize {
    1000
}

/// A base configuration swept over a grid of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    pub n_values: Vec<usize>,
    #[serde(default = "default_reps")]
    pub bootstrap_reps: usize,
}

impl SweepConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self> {
        let mut sweep: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        sweep.base.load_files(base_dir)?;
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn configs(&self) -> Vec<ExperimentConfig> {
        self.n_values
            .iter()
            .map(|&n| {
                let mut c = self.base.clone();
                c.n = n;
                c
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_values.is_empty() {
            return Err(Error::Config("n_values must not be empty".into()));
        }
        if self.bootstrap_reps == 0 {
            return Err(Error::Config("bootstrap_reps must be positive".into()));
        }
        self.configs().iter().try_for_each(ExperimentConfig::validate)
    }
}

/// Per-`(n, target)` summary of first-hit times over the uncensored trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub n: usize,
    pub target: String,
    pub trials: usize,
    pub hits: usize,
    pub censored: usize,
    pub summary: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetFit {
    pub target: String,
    pub fit: PowerLawFit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub fits: Vec<TargetFit>,
}

/// Runs every trial of every config on `parallelism` workers.
///
/// Trials are a parallel map; the reduction walks them in
/// `(config, trial_id)` order, so results do not depend on `parallelism`.
pub fn run_sweep(
    configs: &[ExperimentConfig],
    parallelism: usize,
    bootstrap_reps: usize,
) -> Result<SweepResult> {
    for c in configs {
        c.validate()?;
    }
    let jobs: Vec<(usize, u64)> = configs
        .iter()
        .enumerate()
        .flat_map(|(i, c)| (0..c.trials as u64).map(move |t| (i, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let records: Vec<TrialRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(i, t)| {
                run_trial(&configs[i], t).map_err(|e| {
                    Error::InvalidInput(format!("trial {t} with n = {}: {e}", configs[i].n))
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let (aggregates, fits) = aggregate(configs, &records, bootstrap_reps)?;
    Ok(SweepResult {
        records,
        aggregates,
        fits,
    })
}

/// Builds the summary table and one power-law fit of mean hit time against
/// `n` per target (when at least two distinct `n` have a positive mean).
pub fn aggregate(
    configs: &[ExperimentConfig],
    records: &[TrialRecord],
    bootstrap_reps: usize,
) -> Result<(Vec<AggregateRow>, Vec<TargetFit>)> {
    let base_seed = configs.first().map_or(0, |c| c.base_seed);
    let mut grouped: BTreeMap<(usize, usize), (String, usize, Vec<f64>)> = BTreeMap::new();
    for rec in records {
        for (ti, tr) in rec.targets.iter().enumerate() {
            let entry = grouped
                .entry((rec.n, ti))
                .or_insert_with(|| (tr.target.label(), 0, Vec::new()));
            entry.1 += 1;
            if let Some(h) = tr.first_hit {
                entry.2.push(h as f64);
            }
        }
    }
    let mut rows = Vec::with_capacity(grouped.len());
    for (&(n, ti), (label, trials, hits)) in &grouped {
        let summary = if hits.is_empty() {
            None
        } else {
            let mut rng = RandomStream::new(mix_seed(base_seed ^ n as u64, ti as u64));
            Some(summarize(hits, bootstrap_reps, &mut rng)?)
        };
        rows.push(AggregateRow {
            n,
            target: label.clone(),
            trials: *trials,
            hits: hits.len(),
            censored: trials - hits.len(),
            summary,
        });
    }
    let mut by_target: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    for row in &rows {
        if let Some(s) = row.summary {
            by_target
                .entry(row.target.clone())
                .or_default()
                .push((row.n as f64, s.mean));
        }
    }
    let fits = by_target
        .into_iter()
        .filter_map(|(target, points)| {
            fit_power_law(&points).ok().map(|fit| TargetFit { target, fit })
        })
        .collect();
    Ok((rows, fits))
}
