//! Ground truth and instrumentation: exact optimal discrepancy, the drift
//! potential, gap statistics, distribution distances and summary statistics.

mod chain;
mod potential;
mod stats;
mod subset_sum;

pub use chain::{stationary_by_power_iteration, walk_transition_matrix};
pub use potential::potential_g;
pub use stats::{
    drift_by_bucket, empirical_drift, fit_power_law, max_zero_run, gap_statistic, summarize,
    tv_distance, DriftBucket, PowerLawFit, Summary, MIN_RELIABLE_BUCKET,
};
pub use subset_sum::{optimal_discrepancy, optimal_discrepancy_with_budget, DEFAULT_TABLE_BUDGET};
