use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("stability index {0} outside the supported range [0.05, 1.99]")]
    InvalidAlpha(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown trajectory model `{0}`")]
    UnknownModel(String),

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("trajectory query at time {time} outside the generated window [-{horizon}, {horizon}]")]
    OutsideTrajectoryWindow { time: f64, horizon: f64 },

    #[error("integral diverges: partial sums {partial_sums:?}")]
    Divergent { partial_sums: Vec<f64> },

    #[error("non-finite kernel value at t = {time} for point {point}")]
    NonFinite { time: f64, point: String },

    #[error("covariance matrix is not positive semidefinite (pivot {pivot} = {value:e})")]
    NotPositiveSemidefinite { pivot: usize, value: f64 },

    #[error("conditioning set {{|f_0|^alpha in K}} received no Monte Carlo mass")]
    EmptyConditioningSet,

    #[error("operation not supported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
