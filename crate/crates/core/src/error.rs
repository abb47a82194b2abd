use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on node {node}")]
    SelfLoop { line: usize, node: String },

    #[error("line {line}: duplicate edge {u} {v}")]
    DuplicateEdge { line: usize, u: String, v: String },

    /// The weight recursion hit a zero or negative denominator. `rank` is 1-based.
    #[error("weight recursion is singular at rank {rank}")]
    SingularWeights { rank: usize },

    #[error("infeasible constraints: {0}")]
    InfeasibleConstraints(String),

    #[error("Newman-Girvan model not applicable: k_max = {k_max} >= sqrt(2L) = {limit:.6}")]
    InfeasibleNg { k_max: usize, limit: f64 },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;
