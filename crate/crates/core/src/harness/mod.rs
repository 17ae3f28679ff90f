//! Experiment orchestration: configuration, trials with hit detection,
//! parallel sweeps and CSV output.

mod config;
pub mod output;
mod sweep;
mod trial;

pub use config::{Bound, ExperimentConfig, InitMode, ModelKind, TargetSpec};
pub use sweep::{
    aggregate, default_parallelism, run_sweep, AggregateRow, SweepConfig, SweepResult, TargetFit,
    THREADS_ENV,
};
pub use trial::{
    build_instance, init_assignment, run_trial, trial_seed, TargetRecord, TraceSample, TrialRecord,
};
