use std::io;

use thiserror::Error;

/// Errors produced by the embedding toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] io::Error),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("graph is empty after removing self-loops and isolated vertices")]
    EmptyGraph,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vertex {vertex} has zero weighted degree")]
    ZeroRowSum { vertex: usize },

    #[error(
        "weight pattern has {components} connected components; embed each component separately"
    )]
    Disconnected { components: usize },

    #[error("eigensolver did not converge after {matvecs} matvecs (worst residual {residual:.3e})")]
    NoConvergence { matvecs: usize, residual: f64 },

    #[error("power-law fit impossible: {0}")]
    Unfittable(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("unknown vertex label {0}")]
    UnknownLabel(u64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
