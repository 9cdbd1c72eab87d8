use thiserror::Error;

/// Errors raised by the engine.
///
/// The split between [`Error::Domain`] and [`Error::Structural`] matters to
/// callers: the first means the input is outside the supported class, the
/// second means an identity that must hold for valid input did not.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("structural failure: {0}")]
    Structural(String),
    #[error("unknown variable: {0}")]
    Registry(String),
    #[error("inconsistent linear system")]
    Inconsistent,
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    /// True for failures of internal identities (as opposed to bad input).
    pub fn is_structural(&self) -> bool {
        matches!(self, Error::Structural(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
