use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generation must be at least 1, got {0}")]
    InvalidGeneration(u32),

    #[error("generation {requested} exceeds the configured cap of {cap}")]
    GenerationTooLarge { requested: u32, cap: u32 },

    #[error("vertex index {index} out of range for a graph with {n} vertices")]
    VertexOutOfRange { index: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("outside the formula's domain: {0}")]
    Domain(String),

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),

    #[error("determinant {0} is not a perfect square")]
    NotPerfectSquare(String),

    #[error("count must be positive")]
    ZeroCount,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("matrix is not square or not antisymmetric: {0}")]
    Matrix(String),
}
