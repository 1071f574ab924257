use thiserror::Error;

/// Errors produced while validating, compiling or simulating walk programs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-contract input (non-finite entries, shape
    /// mismatches, unnormalized states, non-unitary coins, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested measurement cannot be realized from the current
    /// residual operator, i.e. the input is not a valid (remaining) POVM.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A numerical invariant of a synthesis pipeline broke beyond tolerance.
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    /// Conditioning on a walker position that is never reached.
    #[error("no amplitude at position {position} (probability {probability:e})")]
    NoAmplitude { position: i64, probability: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn infeasible(msg: impl Into<String>) -> Error {
    Error::Infeasible(msg.into())
}
