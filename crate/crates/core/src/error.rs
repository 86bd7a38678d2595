use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed row {row}: expected {expected} columns, found {found}")]
    MalformedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("bad label {value:?} at row {row}: labels must be 0 or 1")]
    BadLabel { row: usize, value: String },
    #[error("bad value {value:?} at row {row}, column {column:?}")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("bad domain tag {value:?} at row {row}")]
    BadDomain { row: usize, value: String },
    #[error("missing column {0:?}")]
    MissingColumn(String),
    #[error("dataset has no target-domain rows")]
    EmptyTarget,
    #[error("dataset has no source-domain rows")]
    EmptySource,
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("feature count mismatch: model expects {expected}, data has {found}")]
    FeatureCountMismatch { expected: usize, found: usize },
    #[error("labels need at least one positive and one negative")]
    DegenerateLabels,
    #[error("invalid config: {0}")]
    Config(String),
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
