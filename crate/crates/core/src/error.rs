use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the pipeline.
///
/// [`Error::kind`] groups them into the coarse classes a front end needs to
/// choose an exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid record field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("line {line}: column `{column}`: cannot parse {value:?} as a finite number")]
    Parse {
        line: u64,
        column: String,
        value: String,
    },

    #[error("non-finite value at row {row}, feature {feature}")]
    NonFinite { row: usize, feature: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("degenerate labels: both classes are required")]
    DegenerateLabels,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("unknown feature `{0}`")]
    UnknownFeature(String),

    #[error("model integrity: {0}")]
    ModelIntegrity(String),

    #[error("brute-force Shapley refuses {used} used features (limit {limit})")]
    TooManyFeatures { used: usize, limit: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad flags, config files or parameter values.
    Config,
    /// Bad input data or model files.
    Data,
    /// An internal invariant did not hold.
    Internal,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Invariant(_) => ErrorKind::Internal,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn validation(field: &str, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
