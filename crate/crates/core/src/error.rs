//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by geometry, tessellation, sampling, SOM and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrisomError {
    /// An argument is malformed or inconsistent with another argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A value lies outside the domain on which the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The geodesic between two points is not unique (antipodal points on a sphere).
    #[error("ambiguous geodesic: {0}")]
    AmbiguousGeodesic(String),
    /// The result cannot be represented in double precision.
    #[error("overflow: {0}")]
    Overflow(String),
    /// Double precision is insufficient to carry out the request reliably.
    #[error("precision error: {0}")]
    Precision(String),
    /// A rejection sampler accepts too few candidates to be useful.
    #[error("efficiency error: {0}")]
    Efficiency(String),
    /// The object is in a state that does not permit the operation.
    #[error("invalid state: {0}")]
    InvalidState(String),
    /// The combination of inputs is outside what the routine supports.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A stability sweep never crossed the detection threshold.
    #[error("no transition: {0}")]
    NoTransition(String),
    /// Reading or writing output files failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GrisomError {
    fn from(e: std::io::Error) -> Self {
        GrisomError::Io(e.to_string())
    }
}

impl From<csv::Error> for GrisomError {
    fn from(e: csv::Error) -> Self {
        GrisomError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for GrisomError {
    fn from(e: serde_json::Error) -> Self {
        GrisomError::Io(e.to_string())
    }
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, GrisomError>;

pub(crate) fn invalid(msg: impl Into<String>) -> GrisomError {
    GrisomError::InvalidArgument(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> GrisomError {
    GrisomError::Domain(msg.into())
}
