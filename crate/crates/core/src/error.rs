use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("bipartite split {dim_a}x{dim_b} does not match matrix dimension {size}")]
    BadSplit { dim_a: usize, dim_b: usize, size: usize },

    #[error("function undefined on eigenvalue {0:e}")]
    DomainError(f64),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("invalid state specification: {0}")]
    InvalidSpec(String),

    #[error("channel strength {0} outside [0, 1]")]
    BadStrength(f64),

    #[error("state dimension {found} does not match {expected} for {qubits} qubits")]
    DimMismatch {
        expected: usize,
        found: usize,
        qubits: usize,
    },

    #[error("{op} requires a {expected} state, got {dim_a}x{dim_b}")]
    DimError {
        op: &'static str,
        expected: &'static str,
        dim_a: usize,
        dim_b: usize,
    },

    #[error("Fisher information must be positive, got {0}")]
    NonPositiveF(f64),

    #[error("measure {0} missing from record")]
    MissingMeasure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
