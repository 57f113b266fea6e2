use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh input: {0}")]
    Mesh(String),

    #[error("invalid material or load data: {0}")]
    Material(String),

    #[error("degenerate element {element}: Jacobian determinant {det_j:e} at quadrature point {point}")]
    DegenerateElement { element: usize, point: usize, det_j: f64 },

    #[error("boundary conditions leave no free degrees of freedom")]
    NoFreeDofs,

    #[error("contact node {node} lies below the foundation (gap {gap:e})")]
    NegativeGap { node: usize, gap: f64 },

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("Cholesky factorization of the interior block failed: {0}")]
    Cholesky(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid solver input: {0}")]
    SolverInput(String),

    #[error("oracle refused problem: {0}")]
    OracleRefused(String),

    #[error("oracle did not reach residual {tol:e} within {iterations} iterations (residual {residual:e})")]
    OracleBudget {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
