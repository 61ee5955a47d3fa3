use thiserror::Error;

/// Errors produced by graph construction, file I/O and the numeric operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("graph is disconnected: no path between nodes {u} and {v}")]
    Disconnected { u: usize, v: usize },

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },

    #[error("edge ({u}, {v}) has nonpositive weight {w}")]
    NonPositiveWeight { u: usize, v: usize, w: f64 },

    #[error("node set must be non-empty")]
    EmptySubset,

    #[error("sampling pattern must have at least one sampling node")]
    EmptyPattern,

    #[error("sampling pattern has {m} ones but the graph has only {n} nodes")]
    PatternTooLarge { m: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
