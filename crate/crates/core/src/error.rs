//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A quadrature or iteration failed to reach its accuracy target.
    #[error("numerical error in {op}: {msg}")]
    Numerical { op: &'static str, msg: String },

    /// A parameter set rejected before any computation runs
    /// (theorem hypotheses, truncation policies, size caps).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A Monte Carlo quality gate failed (ESS floor, oracle mismatch,
    /// discard-rate ceiling). Carries a machine-readable reason.
    #[error("quality gate failed [{gate}]: {msg}")]
    QualityGate { gate: &'static str, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }

    pub fn numerical(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical { op, msg: msg.into() }
    }

    pub fn gate(gate: &'static str, msg: impl Into<String>) -> Self {
        Error::QualityGate { gate, msg: msg.into() }
    }
}
