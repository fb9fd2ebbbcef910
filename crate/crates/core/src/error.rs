//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid robot spec: {0}")]
    InvalidSpec(String),

    #[error("invalid state {state}: {reason}")]
    InvalidState { state: String, reason: String },

    #[error("node index {index} out of range 1..={max}")]
    NodeOutOfRange { index: u32, max: u64 },

    #[error("invalid reward table: {0}")]
    InvalidTable(String),

    #[error("degenerate weights for transition {from} -> {to}: total weight is zero")]
    DegenerateWeight { from: String, to: String },

    #[error("malformed record at line {line}: {reason}")]
    Malformed { line: u64, reason: String },

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} limit exceeded: limit {limit}, reached {reached}")]
    ResourceLimit {
        what: &'static str,
        limit: u64,
        reached: u64,
    },

    #[error("circulation not executable: {0}")]
    NotExecutable(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("empty cycle basis: the graph admits no simple cycles")]
    EmptyBasis,

    #[error("solution failed verification: {0}")]
    SolutionInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
