use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument must be finite, got {0}")]
    Domain(f64),
    #[error("unknown catalog entry `{0}`; known entries: {known}", known = crate::catalog::KNOWN.join(", "))]
    UnknownEntry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} did not converge: best estimate {best}, error estimate {error:e}")]
    NotConverged {
        what: &'static str,
        best: f64,
        error: f64,
    },
    #[error("quadrature on [{a}, {b}] missed its tolerance: best estimate {best}, error estimate {error:e}")]
    Quadrature {
        a: f64,
        b: f64,
        best: Complex64,
        error: f64,
    },
    #[error("successive approximations are not Cauchy; differences {diffs:?}")]
    NotCauchy { diffs: Vec<f64> },
    #[error("invalid BV function: {0}")]
    InvalidBv(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(x))
    }
}
