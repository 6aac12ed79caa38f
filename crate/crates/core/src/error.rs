use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input exceeds the size an exhaustive routine accepts.
    #[error("{what}: size {actual} exceeds the limit {limit} (raise it with KLADDER_MAX_N)")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    /// Structurally malformed input.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Well-formed input violating a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Text that does not parse.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}
