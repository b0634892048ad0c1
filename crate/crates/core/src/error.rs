use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("header mismatch: {0}")]
    HeaderMismatch(String),

    #[error("row {row}, column '{column}': {message}")]
    Cell {
        row: usize,
        column: String,
        message: String,
    },

    #[error("ragged row {row}: expected {expected} cells, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("missing column '{0}'")]
    MissingColumn(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("need two classes, found {found}")]
    SingleClass { found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("negative feature value {value} in column {column}; shift features to be non-negative first")]
    NegativeFeature { column: usize, value: f64 },

    #[error(
        "logistic loss became non-finite at iteration {iteration}; use a smaller learning rate"
    )]
    Diverged { iteration: usize },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("fold {fold} failed: {message}")]
    FoldFailed { fold: usize, message: String },

    #[error("grid search failed: every lattice point errored ({0})")]
    GridExhausted(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
