use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid item token {0:?}")]
    InvalidItem(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot derive order from empty batch")]
    EmptyOrderBatch,

    #[error("transaction is not sorted by the item order at position {position}")]
    OrderViolation { position: usize },

    #[error("mining threshold must be at least 1, got {0}")]
    Threshold(u64),

    #[error("batch {got} out of sequence, expected {expected}")]
    Sequence { expected: u64, got: u64 },

    #[error("window length must be at least 1 batch")]
    EmptyWindow,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
