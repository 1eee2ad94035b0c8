use thiserror::Error;

use crate::orbit::OrbitSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix has no entries")]
    Empty,

    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("matrix is not Hermitian (relative deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive definite (eigenvalues in [{min:.3e}, {max:.3e}])")]
    NotPositiveDefinite { min: f64, max: f64 },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parameter {name} = {value} is out of range")]
    ParamOutOfRange { name: &'static str, value: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("matrix is singular or numerically singular")]
    SingularInput,

    #[error("{0} requires a positive definite argument")]
    DomainError(&'static str),

    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("log-majorization needs strictly positive entries, found {0}")]
    NonPositiveEntry(f64),

    #[error("trace condition violated: tr Z = {found}, tr X + tr Y = {expected}")]
    TraceMismatch { expected: f64, found: f64 },

    #[error("orbit solver hit the iteration cap (best residual {:.3e})", .0.residual)]
    MaxIterReached(Box<OrbitSolution>),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
