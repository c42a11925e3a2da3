use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("expected {expected} breakpoints for {values} values, got {got}")]
    LengthMismatch {
        expected: usize,
        values: usize,
        got: usize,
    },
    #[error("a simple function needs at least one piece")]
    NoPieces,
    #[error("breakpoints must be strictly increasing (index {index}: {prev} >= {next})")]
    BreakpointsNotIncreasing { index: usize, prev: f64, next: f64 },
    #[error("first breakpoint {0} is negative; functions live on the half-line")]
    NegativeStart(f64),
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("invalid exponent p = {0}; need p >= 1 or p = inf")]
    InvalidExponent(f64),
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// The evaluation point lies outside the domain of the transform.
    #[error("point outside the transform domain: {0}")]
    OutOfDomain(String),
    #[error("input function must be real and nonnegative")]
    NegativeFunction,
    #[error("{0} is not supported for this input")]
    Unsupported(String),
    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    QuadratureNotConverged {
        estimate: Complex64,
        error_bound: f64,
    },
}

impl Error {
    /// True for errors caused by an evaluation point rather than by malformed input.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::OutOfDomain(_) | Error::QuadratureNotConverged { .. }
        )
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
