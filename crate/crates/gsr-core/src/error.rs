use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is not connected{0}")]
    Disconnected(String),

    #[error("node set is not a valid hub: {0}")]
    InvalidHub(String),

    #[error("not a tree: {0}")]
    NotATree(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible measurement row {row}: induced subgraph is disconnected")]
    InfeasibleRow { row: usize },

    #[error("retry limit exhausted: no identifiable random block after {0} attempts")]
    RetriesExhausted(u32),

    #[error("recovery ordering violation: {0}")]
    OrderingViolation(String),

    #[error("measurements inconsistent with any 1-sparse vector: {0}")]
    Inconsistent(String),

    #[error("solver did not converge within {iterations} iterations (residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
