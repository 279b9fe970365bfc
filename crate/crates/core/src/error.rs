use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("{0} table is empty")]
    EmptyTable(String),

    #[error("missing value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },

    #[error("cannot parse {value:?} as a finite number at row {row}, column {column:?}")]
    ParseNumeric {
        row: usize,
        column: String,
        value: String,
    },

    #[error("value {value:?} at row {row}, column {column:?} is not in the declared categories")]
    UnknownCategory {
        row: usize,
        column: String,
        value: String,
    },

    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("attack {0} needs a reference table")]
    MissingReference(String),

    #[error("unknown attack family {0:?}")]
    UnknownFamily(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("labels must contain both members and non-members")]
    SingleClass,

    #[error("every attack instance failed")]
    AllAttacksFailed,

    #[error("report version {found:?} is not supported (expected {expected:?})")]
    VersionMismatch { found: String, expected: String },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}
