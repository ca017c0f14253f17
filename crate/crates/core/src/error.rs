use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the tree, data and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input shape: {0}")]
    InputShape(String),

    #[error("empty dataset: {0}")]
    EmptyData(&'static str),

    #[error("invalid tree document at {path}: {message}")]
    TreeParse { path: String, message: String },

    #[error("{}: row {row}, column {column}: {message}", .file.display())]
    Load {
        file: PathBuf,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
