use thiserror::Error;

use crate::model::Violation;
use crate::synchrony::Witness;

/// Errors raised by the analysis, lifting and simulation routines.
#[derive(Debug, Error)]
pub enum GrnError {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid network: {}", summarize(.0))]
    InvalidNetwork(Vec<Violation>),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("{what}: size {size} exceeds the configured cap {cap}; {advice}")]
    SizeCap {
        what: &'static str,
        size: u128,
        cap: u128,
        advice: &'static str,
    },

    #[error("partition {partition} is not a synchrony partition for the {model} model ({} witnesses)", .witnesses.len())]
    NotSynchrony {
        partition: String,
        model: String,
        witnesses: Vec<Witness>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("integration produced a non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summarize(violations: &[Violation]) -> String {
    match violations {
        [] => "no violations".to_string(),
        [only] => only.message.clone(),
        [first, rest @ ..] => format!("{} (and {} more)", first.message, rest.len()),
    }
}

pub type Result<T> = std::result::Result<T, GrnError>;
