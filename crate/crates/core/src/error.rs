use thiserror::Error;

use crate::quat::Quaternion;

/// Errors produced by the verification library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero divisor: cannot invert the zero quaternion")]
    ZeroDivisor,

    #[error("invalid structural set: {0}")]
    InvalidStructuralSet(String),

    #[error("kernel singularity at {0}")]
    Singularity(Quaternion),

    #[error("point {0} is a pole of the Moebius map")]
    MapPole(Quaternion),

    #[error("point {0} lies on the singular locus of the conformal coefficients")]
    SingularLocus(Quaternion),

    #[error("invalid Moebius map: {0}")]
    InvalidMap(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid quadrature resolution: {0}")]
    InvalidResolution(String),

    #[error("certification failed for entry `{label}`: residual {residual:.3e} exceeds {tolerance:.3e}")]
    Certification {
        label: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("point {point} is within {distance:.3e} of the boundary (floor {floor:.3e})")]
    TooCloseToBoundary {
        point: Quaternion,
        distance: f64,
        floor: f64,
    },

    #[error("dictionaries differ in rank ({0} vs {1})")]
    RankMismatch(usize, usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
