use thiserror::Error;

use crate::polarized::Dims;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch { expected: Dims, found: Dims },

    #[error("matrix shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid dimensions: n_plus = {n_plus}, n_minus = {n_minus}")]
    InvalidDims { n_plus: usize, n_minus: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("singular matrix: smallest/largest singular value ratio {ratio:e} below {threshold:e}")]
    Singular { ratio: f64, threshold: f64 },

    #[error("eigenvalue solver did not converge")]
    EigenNonConvergence,

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("radius condition violated: |kappa|(||mu||_* + |lambda gamma|) = {value} >= {limit}")]
    RadiusViolation { value: f64, limit: f64 },

    #[error("invalid flow specification: {0}")]
    InvalidFlow(String),

    #[error("point is not in the real form: residual {0:e}")]
    NotRealForm(f64),

    #[error("basis is rank deficient")]
    RankDeficient,

    #[error("point does not lie on a Grassmannian orbit: {0}")]
    NotOnOrbit(String),

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
