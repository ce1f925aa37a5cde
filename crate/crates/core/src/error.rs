use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state (u={u}, v={v}) lies outside the admissible state space")]
    OutOfStateSpace { u: f64, v: f64 },

    #[error("invariant pair (r={r}, xi={xi}) is not strictly positive")]
    NonPositiveInvariants { r: f64, xi: f64 },

    #[error("flux law '{law}' has non-positive derivative phi'({r}) = {value}")]
    NonPositiveDerivative { law: String, r: f64, value: f64 },

    #[error("adaptive quadrature on [{a}, {b}] stalled at error estimate {estimate:e} after {subdivisions} subdivisions")]
    QuadratureFailure {
        a: f64,
        b: f64,
        estimate: f64,
        subdivisions: usize,
    },

    #[error("wave construction rejected: {0}")]
    AdmissibilityViolation(String),

    #[error("rarefaction root not bracketed for x/t = {x_over_t}")]
    RootNotBracketed { x_over_t: f64 },

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("cell {index} left the invariant box: (a={a}, b={b})")]
    StateSpaceExit { index: usize, a: f64, b: f64 },

    #[error("at t = {time}: {source}")]
    AtTime {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("snapshot cadence of {steps} steps exceeds the allowed {max}")]
    InsufficientCadence { steps: usize, max: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parse error in {origin}: {message}")]
    Parse { origin: String, message: String },

    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Strips any `AtTime` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtTime { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for failures produced by the numerics rather than by inputs or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::StabilityViolation { .. }
                | Error::StateSpaceExit { .. }
                | Error::QuadratureFailure { .. }
                | Error::AdmissibilityViolation(_)
                | Error::RootNotBracketed { .. }
                | Error::NonPositiveDerivative { .. }
                | Error::OutOfStateSpace { .. }
                | Error::NonPositiveInvariants { .. }
                | Error::InsufficientCadence { .. }
        )
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
