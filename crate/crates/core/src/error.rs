//! Error type shared by all numerical modules.

use std::fmt;

/// Coarse error category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// Invalid parameters or malformed configuration.
    Parameter,
    /// A quadrature, extrapolation or root bracket failed to reach the
    /// requested accuracy, or the quantity is genuinely divergent.
    Accuracy,
    /// A grid or lattice is too coarse for the requested operation.
    Resolution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Parameters violate a domain invariant (e.g. Bose gas with mu >= 0).
    InvalidParameter(String),
    /// The operation is not defined for this input (e.g. the distributional
    /// derivative of the zero-temperature Fermi step).
    Unsupported(String),
    /// Requested accuracy not reached; carries the achieved estimate.
    Accuracy {
        what: String,
        achieved: f64,
        requested: f64,
    },
    /// Evaluation too close to a singular set of a closed form.
    Singularity { what: String, distance: f64 },
    /// A multiplier lattice came too close to the non-invertible set.
    NearSingular {
        what: String,
        margin: f64,
        omega: f64,
        kmag: f64,
    },
    /// Grid too coarse (aliasing, wraparound or non-Cauchy refinement).
    Resolution(String),
    /// Time integration became unstable.
    Integration(String),
    /// Malformed configuration text or table file.
    Config(String),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::InvalidParameter(_) | Error::Unsupported(_) | Error::Config(_) => {
                ErrorCategory::Parameter
            }
            Error::Accuracy { .. } | Error::Singularity { .. } | Error::NearSingular { .. } => {
                ErrorCategory::Accuracy
            }
            Error::Resolution(_) | Error::Integration(_) => ErrorCategory::Resolution,
        }
    }

    pub fn accuracy(what: impl Into<String>, achieved: f64, requested: f64) -> Self {
        Error::Accuracy {
            what: what.into(),
            achieved,
            requested,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Unsupported(msg) => write!(f, "unsupported operation: {msg}"),
            Error::Accuracy {
                what,
                achieved,
                requested,
            } => write!(
                f,
                "accuracy failure in {what}: achieved {achieved:.3e}, requested {requested:.3e}"
            ),
            Error::Singularity { what, distance } => {
                write!(f, "singular-set proximity in {what}: distance {distance:.3e}")
            }
            Error::NearSingular {
                what,
                margin,
                omega,
                kmag,
            } => write!(
                f,
                "near-singular multiplier in {what}: margin {margin:.3e} at (omega={omega}, k={kmag})"
            ),
            Error::Resolution(msg) => write!(f, "resolution failure: {msg}"),
            Error::Integration(msg) => write!(f, "integration failure: {msg}"),
            Error::Config(msg) => write!(f, "config error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
