//! Error types shared by the whole crate.

use thiserror::Error;

/// Unified error type for algebra, cone, and state operations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input data violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Vector or matrix sizes do not match the algebra dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The request is outside what this backend can decide.
    #[error("capability limit: {0}")]
    Capability(String),

    /// Two independent internal routes disagreed; this indicates a bug
    /// or a numerically hostile instance and is never swallowed.
    #[error("internal consistency failure: {0}")]
    Inconsistency(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn dim(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}
