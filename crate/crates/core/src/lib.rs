//! Randomized local search and the (1+1) EA on two-machine makespan
//! scheduling whose processing times change while the search runs.
//!
//! * [`model`]: instances, assignments and states with cached loads.
//! * [`search`]: RLS and (1+1) EA steps.
//! * [`dynamics`]: adversarial and random-walk changes, change schedules.
//! * [`oracle`]: exact optimum, potential function, statistics.
//! * [`harness`]: configured trials, sweeps and CSV output.
//! * [`experiments`]: special-purpose measurements (recovery, drift, gaps).

pub mod dynamics;
mod error;
pub mod experiments;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod search;

pub use error::{Error, Result};
pub use model::{min_fuller_bound, Assignment, Fuller, Instance, Machine, SearchState};
pub use rng::RandomStream;
pub use search::{AlgorithmKind, Mutator, StepOutcome};
