//! Crate-wide error type.

use std::fmt;

/// Errors produced by the simulation library.
#[derive(Debug)]
pub enum SimError {
    /// Two fields built on different `DomainSpec`s were combined.
    DomainMismatch { context: &'static str },
    /// A sample array does not match the domain's collocation grid.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// The temperature lost strict positivity on the collocation grid.
    /// Signals that the state left the resolvable regime; never repaired
    /// silently.
    NonPositiveTemperature { t: f64, min_theta: f64 },
    /// A non-finite coefficient appeared during time stepping.
    NumericalBlowup { t: f64 },
    /// A mode index outside the enumerated set (or of the wrong kind).
    UnknownMode { detail: String },
    /// A parameter or configuration invariant was violated.
    InvalidParameter(String),
    /// A field that must be curl-free carries rotational content.
    NotCurlFree { max_rotational_coeff: f64 },
    /// A diagnostic needs more samples than the series provides.
    InsufficientSamples { needed: String, got: usize },
    /// Configuration text failed to parse or validate.
    Config(String),
    /// Underlying I/O failure.
    Io(std::io::Error),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::DomainMismatch { context } => {
                write!(f, "domain mismatch in {context}")
            }
            SimError::DimensionMismatch { expected, got } => write!(
                f,
                "grid dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            SimError::NonPositiveTemperature { t, min_theta } => write!(
                f,
                "non-positive temperature at t = {t}: min over grid = {min_theta}"
            ),
            SimError::NumericalBlowup { t } => {
                write!(f, "non-finite coefficient at t = {t}")
            }
            SimError::UnknownMode { detail } => write!(f, "unknown mode: {detail}"),
            SimError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            SimError::NotCurlFree {
                max_rotational_coeff,
            } => write!(
                f,
                "field is not curl-free: max rotational coefficient {max_rotational_coeff:e}"
            ),
            SimError::InsufficientSamples { needed, got } => {
                write!(f, "insufficient samples: need {needed}, got {got}")
            }
            SimError::Config(msg) => write!(f, "config error: {msg}"),
            SimError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for SimError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SimError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SimError {
    fn from(e: std::io::Error) -> Self {
        SimError::Io(e)
    }
}

/// Stable machine-readable tag for each error kind, used by the CLI's
/// error JSON and exit-code mapping.
impl SimError {
    pub fn kind(&self) -> &'static str {
        match self {
            SimError::DomainMismatch { .. } => "domain_mismatch",
            SimError::DimensionMismatch { .. } => "dimension_mismatch",
            SimError::NonPositiveTemperature { .. } => "non_positive_temperature",
            SimError::NumericalBlowup { .. } => "numerical_blowup",
            SimError::UnknownMode { .. } => "unknown_mode",
            SimError::InvalidParameter(_) => "invalid_parameter",
            SimError::NotCurlFree { .. } => "not_curl_free",
            SimError::InsufficientSamples { .. } => "insufficient_samples",
            SimError::Config(_) => "config",
            SimError::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
