use thiserror::Error;

/// Errors raised by systems, integrators and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error(
        "implicit solve did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("gradient unavailable and finite differences disabled")]
    GradientUnavailable,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no coadjoint orbit through the origin")]
    DegenerateOrbit,

    #[error("vectors are not tangent to the orbit (|u.m|, |v.m| = {0:e})")]
    NotTangent(f64),

    #[error("eigenvalue computation failed: {0}")]
    EigenFailure(String),

    #[error("numerical blow-up at step {step}")]
    BlowUp { step: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_finite<'a>(
    values: impl IntoIterator<Item = &'a f64>,
    what: &'static str,
) -> Result<()> {
    if values.into_iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
