use thiserror::Error;

use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be positive and finite, got {value}")]
    NonPositiveParameter { name: &'static str, value: f64 },

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },

    #[error("Duan parameter `a` must be nonzero")]
    ZeroDuanParameter,

    #[error("state is not normalizable: |a12| = {a12} must be below a11 = {a11}")]
    NonNormalizable { a11: f64, a12: f64 },

    #[error("Mehler series requires 0 <= beta < 1, got {0}")]
    MehlerDivergence(f64),

    #[error("standard form cannot be recovered: {0}")]
    DegenerateInvariants(String),

    #[error("covariance matrix is not physical: {0}")]
    InvalidCovariance(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("kernel matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("requested {requested} eigenvalues from a {dimension}-dimensional kernel")]
    TooManyEigenvalues { requested: usize, dimension: usize },

    #[error("dense eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("convergence report needs at least two grids, got {0}")]
    TooFewGrids(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn positive<T: Real>(name: &'static str, value: T) -> Result<T> {
    if value.is_finite() && value > T::zero() {
        Ok(value)
    } else {
        Err(Error::NonPositiveParameter { name, value: value.as_f64() })
    }
}

pub(crate) fn finite<T: Real>(name: &'static str, value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteParameter { name, value: value.as_f64() })
    }
}
