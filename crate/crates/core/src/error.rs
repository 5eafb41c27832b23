use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A - A^dagger| = {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("operator is not strictly positive: smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("operator is not positive semidefinite: eigenvalue {eigenvalue:e} below -{tol:e}")]
    NegativeEigenvalue { eigenvalue: f64, tol: f64 },

    #[error("function {function} is undefined at eigenvalue {eigenvalue:e}")]
    Domain { function: String, eigenvalue: f64 },

    #[error("eigensolver failed to converge on a {dim}x{dim} input: {input}")]
    Eigensolver { dim: usize, input: String },

    #[error("linear functional sample is incomplete: {0}")]
    IncompleteSample(String),

    #[error("scalar function pair {name} failed its derivative self-check at x = {x}: finite difference {fd:e} vs f' = {analytic:e}")]
    DerivativeMismatch { name: String, x: f64, fd: f64, analytic: f64 },

    #[error("probe along {direction} failed: {source}")]
    ProbeFailed {
        direction: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parameters outside the data-processing region: {0}")]
    OutsideDpiRegion(String),

    #[error("channel is not trace preserving: ||sum K^dagger K - I||_F = {error:e} exceeds {tol:e}")]
    NotTracePreserving { error: f64, tol: f64 },

    #[error("channel image of {which} is not strictly positive (smallest eigenvalue {min_eigenvalue:e}); use the boundary operations")]
    OutputNotPositive { which: &'static str, min_eigenvalue: f64 },

    #[error("operation {operation} is not supported for {family}")]
    Unsupported { operation: &'static str, family: String },

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl ToString) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
