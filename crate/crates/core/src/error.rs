use thiserror::Error;

/// Errors raised by the models, oracles and experiment harness.
#[derive(Debug, Error, PartialEq)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("assignment has {got} bits, instance has {expected} jobs")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid assignment string: {0}")]
    InvalidAssignment(String),

    #[error("job index {index} out of range for {n} jobs")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("value {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("subset-sum table of {needed} entries exceeds budget of {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
