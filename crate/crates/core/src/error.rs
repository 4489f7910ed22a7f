//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what} supports at most {limit}, got {actual}")]
    SizeGuard {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0}")]
    Invalid(String),

    #[error("group closure did not terminate within {cap} elements")]
    ClosureCap { cap: usize },

    #[error("automorphism search exceeded its node budget ({budget} nodes)")]
    SearchBudget { budget: u64 },

    #[error("decomposition multiplicity is not a nonnegative integer: {context}")]
    NonIntegral { context: String },

    #[error("structure check failed: {0}")]
    Structure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
