//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum KuramotoError {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("row {row}: column index {index} out of range for size {size}")]
    IndexOutOfRange { row: usize, index: usize, size: usize },

    #[error("row {row}: duplicate column index {index}")]
    DuplicateIndex { row: usize, index: usize },

    #[error("row {row}: cached degree {cached} does not match stored row ({actual})")]
    DegreeMismatch { row: usize, cached: usize, actual: usize },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block plan does not match graph: {0}")]
    PlanMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value in state (blow-up); reduce the step size")]
    NonFiniteState,

    #[error("fixed-point iteration did not converge within {iters} iterations")]
    NoConvergence { iters: usize },

    #[error("step size underflow at t = {t}: h = {h} below h_min with error above tolerance")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("matrix market, line {line}: {msg}")]
    MatrixMarket { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, KuramotoError>;
