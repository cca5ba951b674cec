use thiserror::Error;

use crate::novikov::NovikovError;
use crate::words::WordsError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("spec error: {0}")]
    Spec(String),
    #[error("validation failed: {0}")]
    Invalid(String),
    #[error(transparent)]
    Novikov(#[from] NovikovError),
    #[error(transparent)]
    Words(#[from] WordsError),
    #[error("window holds {cells} cells, above the cap of {cap}")]
    Resource { cells: usize, cap: usize },
    #[error("refused: {0}")]
    Refused(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
