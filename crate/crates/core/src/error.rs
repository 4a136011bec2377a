use std::fmt;

use thiserror::Error;

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid signature: {0}")]
    InvalidSignature(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("not a subsignature: {0}")]
    NotSubsignature(String),
    #[error("point {point} out of range for a structure of size {size}")]
    OutOfRange { point: usize, size: usize },
    #[error("not an embedding: {0}")]
    NotAnEmbedding(String),
    #[error("cannot compose: {0}")]
    CompositionMismatch(String),
    #[error("class `{0}` has no generator")]
    MissingGenerator(String),
    #[error("structure is not a member of class `{0}`")]
    NotMember(String),
    #[error("membership predicate of `{class}` is not isomorphism invariant (seed {seed})")]
    NotIsoInvariant { class: String, seed: u64 },
    #[error("amalgamation failed: {0}")]
    AmalgamationFailed(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
