use thiserror::Error;

/// Errors raised by the library.
///
/// `Consistency` is reserved for situations where two independent
/// computations disagree; it always indicates a bug or corrupted input data
/// rather than a user mistake, and the CLI maps it to a distinct exit status.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("enumeration limit exceeded: {size} elements > limit {limit}")]
    LimitExceeded { size: u128, limit: u64 },
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }

    pub fn is_consistency(&self) -> bool {
        matches!(self, Error::Consistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
