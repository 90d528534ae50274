use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed input file (edge list, partition, feature CSV). Line numbers
    /// are 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// A layer with zero total edge weight, by index.
    #[error("empty layer {0}")]
    EmptyLayer(usize),

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown community {0}")]
    UnknownCommunity(usize),

    #[error("empty list")]
    EmptyList,

    /// A generator could not produce a legal graph within its retry budget,
    /// or was asked for something structurally impossible.
    #[error("generation failed: {0}")]
    Generation(String),

    #[error("score table: {0}")]
    Score(String),
}
