use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("index {index} out of range (size {size})")]
    OutOfRange { index: usize, size: usize },

    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),

    #[error("polyhedron is unbounded")]
    Unbounded,

    #[error("point is outside the domain")]
    OutsideDomain,

    #[error("point is not a probability vector")]
    NotADistribution,

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("enumeration budget exceeded: {needed} candidate subsets > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
