use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
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

    #[error("invalid language code {0:?}")]
    InvalidLanguageCode(String),

    #[error("unknown language code {0:?}")]
    UnknownLanguage(String),

    #[error("registry: {0}")]
    Registry(String),

    #[error("invalid sentence pair: {0}")]
    InvalidSentence(String),

    #[error(
        "{path}: {malformed} of {total} lines malformed (limit {limit:.1}%); first at line {first_line}: {first_reason}"
    )]
    TooManyMalformed {
        path: PathBuf,
        malformed: usize,
        total: usize,
        limit: f64,
        first_line: usize,
        first_reason: String,
    },

    #[error("record {index} has no quality score")]
    MissingScore { index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("partition: {0}")]
    Partition(String),

    #[error("length mismatch: {left} hypotheses vs {right} references")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("language identification: {0}")]
    LangId(String),

    #[error("record ids: {0}")]
    IdMismatch(String),

    #[error("missing data: {0}")]
    Missing(String),

    #[error("json: {0}")]
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
