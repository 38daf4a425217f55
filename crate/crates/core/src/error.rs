use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (|det| = {det_abs:e})")]
    Singular { det_abs: f64 },

    #[error("matrix is not symmetric: entry ({row}, {col}) differs from its transpose by {gap:e}")]
    Asymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("non-finite entry at index {0}")]
    NonFinite(usize),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("quadrature did not converge: last two values {previous:e} and {last:e}")]
    QuadratureNoConvergence { previous: f64, last: f64 },

    #[error("cross-ratio spectrum invalid: eigenvalue {re} + {im}i")]
    SpectralValidity { re: f64, im: f64 },

    #[error("matrix is not symplectic: (M^T J M - J)[{row}][{col}] = {residual}")]
    NotSymplectic {
        row: usize,
        col: usize,
        residual: f64,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("value out of floating-point range: exponent {exponent}")]
    Range { exponent: f64 },

    #[error("no admissible element: {0}")]
    Absence(String),

    #[error("degenerate estimate: {0}")]
    Degenerate(String),

    #[error("format error at row {row}: {message}")]
    Format { row: usize, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
