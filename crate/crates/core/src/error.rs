use thiserror::Error;

use crate::space::Event;

/// Errors raised by constructors and checked operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} outcomes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid probability measure: {0}")]
    InvalidProbability(String),

    #[error("random variable has a non-finite entry at outcome {index}")]
    NonFinite { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid distortion function: {0}")]
    InvalidDistortion(String),

    #[error("capacity is not 2-alternating: witness A={a}, B={b}")]
    NotTwoAlternating { a: Event, b: Event },

    #[error("distortion is not star-shaped: witness p={p}, q={q}")]
    NotStarShaped { p: f64, q: f64 },

    #[error("Q is not absolutely continuous w.r.t. P at outcome {outcome}")]
    NotAbsolutelyContinuous { outcome: usize },

    #[error("invalid capacity: {0}")]
    InvalidCapacity(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
