use thiserror::Error;

/// Errors raised by the expansion engine and its oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("zero eigenvalue at index {index}: epsilon matrices need a nonzero spectrum")]
    ZeroEigenvalue { index: usize },

    #[error("work budget exceeded: estimated {estimated} operations, cap {cap}")]
    Budget { estimated: f64, cap: f64 },

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("divided difference over {nodes} nodes exceeds the depth cap of {cap}")]
    Depth { nodes: usize, cap: usize },

    #[error("contour error: {0}")]
    Contour(String),

    #[error("singular shifted matrix at quadrature node {node}: condition estimate {condition:.3e}")]
    Solve { node: usize, condition: f64 },

    #[error("Taylor oracle precondition failed: shifted norm {norm:.6e} >= 0.9 x radius {radius:.6e}")]
    Radius { norm: f64, radius: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("parse error at line {line}, token {token}: {message}")]
    Parse {
        line: usize,
        token: usize,
        message: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
