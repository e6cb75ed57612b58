use thiserror::Error;

/// Errors produced by graph construction, configuration parsing, and
/// simulation aggregation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible edge count {requested} for {nodes} nodes (must be in [{min}, {max}])")]
    InfeasibleEdgeCount {
        requested: usize,
        nodes: usize,
        min: usize,
        max: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("edge normalization failed: {0}")]
    Normalization(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
