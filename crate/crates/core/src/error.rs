//! Error type shared by all modules in the crate.

use thiserror::Error;

/// Errors reported by state validation, generators, and measure evaluation.
#[derive(Debug, Clone, Error)]
pub enum QError {
    #[error("matrix is not Hermitian (max |M - M^dag| = {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("trace is {0}, expected 1")]
    TraceMismatch(f64),

    #[error("state vector norm is {0}, expected 1")]
    NormMismatch(f64),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("operation requires a bipartite state")]
    NotBipartite,

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("rank {rank} invalid for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("eigenvalue {0:.3e} below the negativity floor")]
    NegativeEigenvalue(f64),

    #[error("Kraus operators violate completeness (max deviation {0:.3e})")]
    KrausIncomplete(f64),

    #[error("columns are not orthonormal (max deviation {0:.3e})")]
    NotIsometry(f64),

    #[error("parameter vector has length {got}, expected {expected}")]
    BadLength { got: usize, expected: usize },

    #[error("operation requires a two-qubit (2x2) system")]
    NotTwoQubit,

    #[error("bounds require equal local dimensions, got {0}x{1}")]
    NotSquareBipartite(usize, usize),

    #[error("q = {0} outside (0,1) or (1,2]")]
    QOutOfRange(f64),

    #[error("problem size exceeds the configured budget: {0}")]
    BudgetExceeded(String),
}

pub type Result<T> = std::result::Result<T, QError>;
