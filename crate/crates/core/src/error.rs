use thiserror::Error;

/// Errors shared by every operation in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FsError {
    /// An argument is outside the operation's domain.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// An instance is larger than the configured (or hard) cap.
    #[error("size error: n = {n} exceeds the cap of {cap}")]
    Size { n: usize, cap: usize },
    /// A hypothesis supplied by the caller does not hold.
    #[error("hypothesis error: {0}")]
    Hypothesis(String),
    /// A constructive search could not satisfy its constraints.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Malformed text input.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, FsError>;

pub(crate) fn param<T>(msg: impl Into<String>) -> Result<T> {
    Err(FsError::Parameter(msg.into()))
}
