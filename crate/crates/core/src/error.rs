use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: expected 3 tab-separated fields, found {found}")]
    Parse { path: PathBuf, line: usize, found: usize },

    #[error("{path}:{line}: unknown {kind} `{name}` under a fixed vocabulary")]
    UnknownName {
        path: PathBuf,
        line: usize,
        kind: &'static str,
        name: String,
    },

    #[error("{path}:{line}: duplicate triple within split")]
    DuplicateTriple { path: PathBuf, line: usize },

    #[error("triple ({head}, {relation}, {tail}) out of range for {n_entities} entities / {n_relations} relations")]
    InvalidTriple {
        head: usize,
        relation: usize,
        tail: usize,
        n_entities: usize,
        n_relations: usize,
    },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("non-finite loss at step {step}: {detail}")]
    NonFiniteLoss { step: u64, detail: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
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

pub type Result<T> = std::result::Result<T, Error>;
