use std::path::PathBuf;

use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("invalid bar on {date}: {msg}")]
    InvalidBar { date: NaiveDate, msg: String },

    #[error("country {country} rejected: {reason}")]
    CountryRejected { country: String, reason: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("date sets do not overlap")]
    EmptyJoin,

    #[error("insufficient observations: need {needed}, got {got}")]
    InsufficientRows { needed: usize, got: usize },

    #[error("collinear design columns: {}", .0.join(", "))]
    Collinear(Vec<String>),

    #[error("lag length {lags} must be below the number of periods {periods}")]
    LagsTooLarge { lags: usize, periods: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: u64, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
