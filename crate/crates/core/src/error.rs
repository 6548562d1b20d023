use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::canon::CanonError;
use crate::release::AliasError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad pattern: {0}")]
    Regex(#[from] regex::Error),
    #[error("bad url: {0}")]
    Url(#[from] CanonError),
    #[error("alias table: {0}")]
    Alias(#[from] AliasError),
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
