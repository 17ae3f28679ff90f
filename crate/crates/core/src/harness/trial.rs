use serde::Serialize;

use super::config::{ExperimentConfig, InitMode, ModelKind, TargetSpec};
use crate::dynamics::{burn_in, Dynamics};
use crate::error::{Error, Result};
use crate::model::{Assignment, Instance, SearchState};
use crate::oracle::potential_g;
use crate::rng::{mix_seed, RandomStream};
use crate::search::{AlgorithmKind, Mutator};

// Sub-stream labels under a trial seed.
const STREAM_INSTANCE: u64 = 1;
const STREAM_BURN_IN: u64 = 2;
const STREAM_INIT: u64 = 3;
const STREAM_ALGORITHM: u64 = 4;
const STREAM_PICKER: u64 = 5;
const STREAM_DIRECTION: u64 = 6;

/// One point of a decimated trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSample {
    pub t: u64,
    pub discrepancy: u64,
    pub makespan: u64,
    pub jobs_on_fuller: u64,
    /// `g(jobs_on_fuller)` for this trial's `n`.
    pub potential: f64,
}

impl TraceSample {
    pub fn of(t: u64, state: &SearchState) -> Self {
        let k = state.jobs_on_fuller();
        Self {
            t,
            discrepancy: state.discrepancy(),
            makespan: state.makespan(),
            jobs_on_fuller: k as u64,
            potential: potential_g(k as f64, state.n() as u64).expect("jobs on fuller lie in [0, n]"),
        }
    }
}

/// Hitting statistics for one target within one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetRecord {
    pub target: TargetSpec,
    /// First time the target held; `None` means censored at `max_iters`.
    pub first_hit: Option<u64>,
    pub discrepancy_at_hit: Option<u64>,
    pub makespan_at_hit: Option<u64>,
    /// Gaps between successive hits; the detector re-arms after the target fails.
    pub inter_hit_times: Vec<u64>,
    /// Number of evaluated time points at which the target held.
    pub time_satisfied: u64,
}

impl TargetRecord {
    fn new(target: TargetSpec) -> Self {
        Self {
            target,
            first_hit: None,
            discrepancy_at_hit: None,
            makespan_at_hit: None,
            inter_hit_times: Vec::new(),
            time_satisfied: 0,
        }
    }

    pub fn censored(&self) -> bool {
        self.first_hit.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub n: usize,
    pub algorithm: AlgorithmKind,
    pub model: ModelKind,
    pub seed: u64,
    pub initial_discrepancy: u64,
    pub targets: Vec<TargetRecord>,
    pub change_count: u64,
    /// Iterations actually executed (less than `max_iters` only with early stopping).
    pub iterations: u64,
    pub final_discrepancy: u64,
    pub trace: Vec<TraceSample>,
}

/// Seed of trial `trial_id` under `base_seed`.
pub fn trial_seed(base_seed: u64, trial_id: u64) -> u64 {
    mix_seed(base_seed, trial_id)
}

/// Initial assignment for `mode`; `from_file` uses `fixed`.
pub fn init_assignment(
    n: usize,
    mode: InitMode,
    fixed: Option<&Assignment>,
    rng: &mut RandomStream,
) -> Result<Assignment> {
    match mode {
        InitMode::WorstCase => Ok(Assignment::all_on_first(n)),
        InitMode::UniformRandom => Ok(Assignment::from_bits((0..n).map(|_| rng.coin()).collect())),
        InitMode::FromFile => {
            let a = fixed.ok_or_else(|| Error::Config("no assignment given".into()))?;
            if a.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: a.len() });
            }
            Ok(a.clone())
        }
    }
}

/// Instance for one trial: the fixed instance if configured, otherwise sizes
/// uniform in `[L, U]`; random-model instances are then burnt in.
pub fn build_instance(config: &ExperimentConfig, root: &RandomStream) -> Result<Instance> {
    let (lower, upper) = config.bounds()?;
    let instance = match config.fixed_instance() {
        Some(inst) => inst.clone(),
        None => {
            let mut rng = root.fork(STREAM_INSTANCE);
            let sizes = (0..config.n)
                .map(|_| rng.range_inclusive(lower, upper))
                .collect();
            Instance::new(sizes, lower, upper)?
        }
    };
    match config.model {
        ModelKind::Adversary => Ok(instance),
        ModelKind::Random => burn_in(&instance, config.burn_in(), &mut root.fork(STREAM_BURN_IN)),
    }
}

struct HitDetector {
    record: TargetRecord,
    armed: bool,
    last_hit: u64,
}

impl HitDetector {
    #[inline]
    fn observe(&mut self, t: u64, state: &SearchState) {
        let d = state.discrepancy();
        let f = state.makespan();
        let holds = self
            .record
            .target
            .holds(d, f, state.n(), state.instance().upper());
        if !holds {
            self.armed = true;
            return;
        }
        self.record.time_satisfied += 1;
        if !self.armed {
            return;
        }
        self.armed = false;
        if self.record.first_hit.is_none() {
            self.record.first_hit = Some(t);
            self.record.discrepancy_at_hit = Some(d);
            self.record.makespan_at_hit = Some(f);
        } else {
            self.record.inter_hit_times.push(t - self.last_hit);
        }
        self.last_hit = t;
    }
}

/// Runs trial `trial_id` of `config`.
///
/// Time 0 is the initial state. Iteration `k` (0-based) first lets the
/// change model act if the schedule fires at `k`, then performs one
/// algorithm step; the resulting state is observed at time `k + 1`.
pub fn run_trial(config: &ExperimentConfig, trial_id: u64) -> Result<TrialRecord> {
    config.validate()?;
    let seed = trial_seed(config.base_seed, trial_id);
    let root = RandomStream::new(seed);

    let instance = build_instance(config, &root)?;
    let assignment = init_assignment(
        config.n,
        config.init,
        config.fixed_assignment(),
        &mut root.fork(STREAM_INIT),
    )?;
    let mut state = SearchState::new(instance, assignment)?;
    let mut dynamics = Dynamics::new(
        config.change_model(),
        config.schedule()?,
        root.fork(STREAM_PICKER),
        root.fork(STREAM_DIRECTION),
    )?;
    let mutator = Mutator::new(config.algorithm, config.n);
    let mut algo_rng = root.fork(STREAM_ALGORITHM);

    let mut detectors: Vec<HitDetector> = config
        .targets
        .iter()
        .map(|&t| HitDetector {
            record: TargetRecord::new(t),
            armed: true,
            last_hit: 0,
        })
        .collect();
    let mut trace = Vec::new();
    let initial_discrepancy = state.discrepancy();
    let max_iters = config.effective_max_iters();

    let observe = |t: u64, state: &SearchState, detectors: &mut [HitDetector], trace: &mut Vec<TraceSample>| {
        for d in detectors.iter_mut() {
            d.observe(t, state);
        }
        if let Some(every) = config.trace_every {
            if t % every == 0 {
                trace.push(TraceSample::of(t, state));
            }
        }
    };

    observe(0, &state, &mut detectors, &mut trace);
    let mut change_count = 0;
    let mut iterations = 0;
    for k in 0..max_iters {
        if config.stop_when_all_hit && detectors.iter().all(|d| d.record.first_hit.is_some()) {
            break;
        }
        if dynamics.maybe_change(&mut state, k)?.is_some() {
            change_count += 1;
        }
        mutator.step(&mut state, &mut algo_rng);
        iterations = k + 1;
        observe(k + 1, &state, &mut detectors, &mut trace);
    }
    debug_assert!(state.is_consistent());

    Ok(TrialRecord {
        trial_id,
        n: config.n,
        algorithm: config.algorithm,
        model: config.model,
        seed,
        initial_discrepancy,
        targets: detectors.into_iter().map(|d| d.record).collect(),
        change_count,
        iterations,
        final_discrepancy: state.discrepancy(),
        trace,
    })
}
