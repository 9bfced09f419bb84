use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("failed to parse design: {0}")]
    Parse(String),
    #[error("column `{0}` is not two-level ({1} distinct values)")]
    NotTwoLevel(String, usize),
    #[error("duplicate factor name `{0}`")]
    DuplicateName(String),
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("term `{0}` has zero norm after centering")]
    ZeroNormColumn(String),
    #[error("column `{0}` is not balanced")]
    Unbalanced(String),
    #[error("no Hadamard matrix construction available for order {0}")]
    UnsupportedOrder(usize),
    #[error("covariance is not positive semidefinite (smallest eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
