//! Error type shared across the toolkit.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by loaders, validators, and pipeline stages.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A line-delimited record failed to parse. `field` names the offending
    /// key when it can be determined from the decoder.
    #[error("{path}:{line}: malformed record (field `{field}`): {detail}")]
    MalformedRecord {
        path: PathBuf,
        line: usize,
        field: String,
        detail: String,
    },

    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },

    #[error("unknown {kind} id `{id}`")]
    UnknownId { kind: &'static str, id: String },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArg(String),

    #[error("bad file format in {path}: {detail}")]
    Format { path: PathBuf, detail: String },

    #[error("truncated file {path}: expected {expected} bytes, found {actual}")]
    Truncated {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("non-finite value in row `{row_id}`")]
    NonFinite { row_id: String },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("no gold label for question `{question_id}`")]
    MissingGold { question_id: String },

    #[error("budget {budget} smaller than bare prompt rendering ({required} chars)")]
    BudgetTooSmall { budget: usize, required: usize },

    /// A metric is undefined on the given input (empty relevant set,
    /// fewer than two clusters, coincident centroids, ...).
    #[error("metric undefined: {0}")]
    Undefined(String),

    /// Remote call failed at the transport level (connect, timeout, 5xx).
    #[error("transport error for question `{question_id}`: {detail}")]
    Transport { question_id: String, detail: String },

    /// Remote call returned a payload that violates the wire contract.
    #[error("protocol error for question `{question_id}`: {detail}")]
    Protocol { question_id: String, detail: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
