use std::path::PathBuf;

/// Errors raised anywhere in the lab.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid mixture spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: cannot parse {value:?} as a number")]
    ParseField {
        row: usize,
        column: usize,
        value: String,
    },

    #[error("label column holds non-binary value {value} (row {row})")]
    NonBinaryLabel { row: usize, value: f64 },

    #[error("label column {0:?} not found")]
    MissingColumn(String),

    #[error("Newton solver did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NewtonFailed { iterations: usize, grad_norm: f64 },

    #[error("non-finite gradient at SGLD iteration {iteration} (|w| = {w_norm:e})")]
    NonFiniteGradient { iteration: usize, w_norm: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
