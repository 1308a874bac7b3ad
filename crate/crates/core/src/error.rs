use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// An enumeration would exceed the configured size limit.
    #[error("{what} would need {needed} items, over the cap of {cap}")]
    CapExceeded {
        what: String,
        needed: u128,
        cap: u128,
    },

    /// A procedure was called on an object that lacks a required property.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A proven statement failed on a concrete instance; always a bug or a
    /// malformed instance, never an expected outcome.
    #[error("theorem violated: {claim}: {detail}")]
    TheoremViolation {
        claim: String,
        detail: String,
        witness: Vec<usize>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub fn violation(
        claim: impl Into<String>,
        detail: impl Into<String>,
        witness: Vec<usize>,
    ) -> Self {
        Error::TheoremViolation {
            claim: claim.into(),
            detail: detail.into(),
            witness,
        }
    }

    pub fn cap(what: impl Into<String>, needed: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            needed,
            cap,
        }
    }
}
