use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while loading data, building graphs or running analyses.
#[derive(Debug, Error)]
pub enum Error {
    #[error("format error: {0}")]
    Format(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("parameter error: {0}")]
    Param(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn non_finite(row: usize, col: usize) -> Self {
        Error::Data(format!("non-finite value at row {row}, col {col}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
