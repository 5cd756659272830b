use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("quotient is not finite")]
    NotFinite,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precision insufficient to isolate an integer ({0}); raise precision")]
    RaisePrecision(String),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("insufficient relations: {0}")]
    InsufficientRelations(String),
    #[error("validation failed [{invariant}]: {detail}")]
    Validation { invariant: String, detail: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("not stabilized at level {0}")]
    NotStabilized(usize),
    #[error("missing data: {0}")]
    MissingData(String),
    #[error("io: {0}")]
    Io(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn validation(invariant: &str, detail: impl Into<String>) -> Self {
        Error::Validation {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
