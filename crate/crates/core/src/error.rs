use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter violates its invariant. `field` is a
    /// dotted path such as `params.kappa`.
    #[error("{field}: {message}")]
    InvalidParameter { field: String, message: String },

    #[error("non-finite amplitude encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("time step {dt} exceeds the stiffness bound 0.1/kappa = {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("imaginary residue {residue:e} in an observable derivative that must be real")]
    ComplexDerivative { residue: f64 },

    #[error("analysis window too short: {reason}")]
    WindowTooShort { reason: String },

    #[error("imaginary-time propagation did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("stability analysis requires a converged ground state (residual {residual:e})")]
    GroundStateNotConverged { residual: f64 },

    #[error("eigensolver did not converge within {iterations} QR iterations")]
    NoConvergence { iterations: usize },

    #[error("no organization threshold: NU0 - 2*delta_c = {denominator} is not positive")]
    NoThreshold { denominator: f64 },

    #[error("checkpoint {path} does not match the grid specification: {reason}")]
    SpecMismatch { path: PathBuf, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than a failed computation.
    pub fn is_usage_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::StepTooLarge { .. }
                | Error::Config(_)
                | Error::WindowTooShort { .. }
                | Error::SpecMismatch { .. }
        )
    }
}
