use thiserror::Error;

/// Errors raised anywhere in the verification pipeline.
///
/// `Inconclusive` is reserved for searches that hit a configured cap; callers
/// must never treat it as a negative answer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("polynomial is reducible over the rationals: {0}")]
    Reducible(String),
    #[error("degree {0} exceeds the supported maximum of 8")]
    DegreeTooLarge(usize),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("fixture verification failed: {0}")]
    FixtureRejected(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical certification failed: {0}")]
    Precision(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
