use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    /// Malformed or out-of-contract input (non-finite samples, grid mismatch, bad parameter).
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Evaluation at or too close to a pole / singularity.
    #[error("domain error: {0}")]
    Domain(String),
    /// A solver did not reach its residual target.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    /// Input is too degenerate for a stable computation (e.g. signal vanishes on the grid).
    #[error("ill-conditioned input: {0}")]
    IllConditioned(String),
    /// A configured size cap would be exceeded.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: usize },
}

impl HardyError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        HardyError::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        HardyError::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        HardyError::NumericalFailure(msg.into())
    }

    /// True for errors that stem from the caller's input rather than from a solver.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            HardyError::InvalidInput(_)
                | HardyError::Domain(_)
                | HardyError::Resource(_)
                | HardyError::IndexOutOfRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, HardyError>;
