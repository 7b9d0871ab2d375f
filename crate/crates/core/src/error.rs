use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dangling hypernym pointer to {pos} offset {offset:08} in {path}")]
    DanglingPointer {
        path: PathBuf,
        pos: char,
        offset: u32,
    },

    #[error("hypernym links form a cycle through synset {0}")]
    Cycle(String),

    #[error("synset {0} is not part of this index")]
    UnknownSynset(String),

    #[error("unknown moral foundation {0:?}")]
    UnknownFoundation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus has {available} tweets but the training split needs {requested}")]
    CorpusTooSmall { available: usize, requested: usize },

    #[error("tweet ids differ between predictions and ground truth: missing from predictions {missing:?}, unknown to ground truth {extra:?}")]
    TweetMismatch {
        missing: Vec<String>,
        extra: Vec<String>,
    },

    #[error("cache file {path} is stale or incompatible")]
    StaleCache { path: PathBuf },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
