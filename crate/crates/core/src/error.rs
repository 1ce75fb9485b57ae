use alloc::string::String;

/// Errors raised by the models in this crate.
///
/// Every variant names the module it originates from through [`Error::module`],
/// so front ends can report where a failure came from without string matching.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("`{field}` references unknown id `{id}`")]
    DanglingReference { field: String, id: String },

    #[error("{module}: domain error: {reason}")]
    Domain { module: &'static str, reason: String },

    #[error("{module}: dimension mismatch in {what}: expected {expected}, got {actual}")]
    DimensionMismatch {
        module: &'static str,
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{module}: index {index} out of range (len {len})")]
    Index {
        module: &'static str,
        index: usize,
        len: usize,
    },

    #[error("channel: geometry error: {0}")]
    Geometry(String),

    #[error("impairments: frequency {freq_hz} Hz violates Nyquist limit for sample rate {sample_rate_hz} Hz")]
    NyquistViolation { freq_hz: f64, sample_rate_hz: f64 },

    #[error("array: covariance is singular (condition number {condition:e})")]
    SingularCovariance { condition: f64 },

    #[error("array: channel matrix is rank deficient (condition number {condition:e})")]
    RankDeficient { condition: f64 },

    #[error("array: query direction ({phi_deg} deg, {theta_deg} deg) outside tabulated grid")]
    OutOfGrid { phi_deg: f64, theta_deg: f64 },

    #[error("coverage: demand balance unachievable (max/min ratio {ratio} > tolerance {tolerance})")]
    BalanceUnachievable { ratio: f64, tolerance: f64 },

    #[error("coverage: degenerate input: {0}")]
    DegenerateInput(String),

    #[error("coverage: degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("coverage: no catalog beam covers {required:.1}% of the demand of cluster {cluster}")]
    NoFittingBeam { cluster: usize, required: f64 },
}

impl Error {
    /// Name of the module the error originates from.
    pub fn module(&self) -> &'static str {
        match self {
            Error::Validation { .. } | Error::DanglingReference { .. } => "scenario",
            Error::Domain { module, .. }
            | Error::DimensionMismatch { module, .. }
            | Error::Index { module, .. } => module,
            Error::Geometry(_) => "channel",
            Error::NyquistViolation { .. } => "impairments",
            Error::SingularCovariance { .. }
            | Error::RankDeficient { .. }
            | Error::OutOfGrid { .. } => "array",
            Error::BalanceUnachievable { .. }
            | Error::DegenerateInput(_)
            | Error::DegenerateGeometry(_)
            | Error::NoFittingBeam { .. } => "coverage",
        }
    }

    pub(crate) fn domain(module: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            module,
            reason: reason.into(),
        }
    }

    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn dims(module: &'static str, what: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            module,
            what,
            expected,
            actual,
        }
    }
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
