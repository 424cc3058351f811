use thiserror::Error;

/// Errors raised by the measure, region, construction and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("efficiency is undefined for a spectrum proportional to the identity (F = 1)")]
    UndefinedEfficiency,

    #[error("measurement is incomplete: completeness residual {residual:e} exceeds {tolerance:e}")]
    IncompleteMeasurement { residual: f64, tolerance: f64 },

    #[error("no tangent point exists for d = {0}")]
    NoTangentPoint(usize),

    #[error("tangent search found {0} sign changes of D - S, expected exactly one")]
    AmbiguousTangent(usize),

    #[error("finite-difference estimate is unreliable: {0}")]
    Unreliable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
