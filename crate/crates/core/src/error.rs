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

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("node id {id} out of range (num_nodes = {num_nodes})")]
    NodeOutOfRange { id: usize, num_nodes: usize },

    #[error("duplicate edge {src} -> {dst}")]
    DuplicateEdge { src: usize, dst: usize },

    #[error("self-loop on node {0} is not allowed in the input graph")]
    SelfLoop(usize),

    #[error("tensor archive: {0}")]
    Archive(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("node {node} has {players} players; at least 2 are required")]
    TooFewPlayers { node: usize, players: usize },

    #[error("linear system is singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("batch {batch} failed to allocate scratch space")]
    OutOfMemory { batch: usize },

    #[error("fingerprint mismatch: explanation was produced with {found}, expected {expected}")]
    FingerprintMismatch { expected: String, found: String },

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
}
