use thiserror::Error;

/// Errors raised by the analysis kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi} have the same sign")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("eigensolver did not converge on {n}x{n} matrix")]
    EigenNoConvergence { n: usize, matrix: Vec<f64> },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64, last: Vec<f64> },

    #[error("step size underflow at t = {t} (h = {h:.3e}); system may be stiff")]
    Stiffness { t: f64, h: f64 },

    #[error("trajectory diverged at t = {t}")]
    Divergence { t: f64 },

    #[error("not a cycle: {0}")]
    NotACycle(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("config error at `{path}`: {msg}")]
    Config { path: String, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Whether the error comes from numerics rather than from user input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Config { .. } | Error::UnknownParameter(_) | Error::Io(_) | Error::Domain(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
