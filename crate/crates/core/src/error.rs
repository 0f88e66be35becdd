use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("block probability matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e} < -1e-10")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("edge probability X_{i}^T X_{j} = {value} lies outside [0, 1]")]
    ProbabilityOutOfRange { i: usize, j: usize, value: f64 },

    #[error("retained eigenvalue #{index} is not positive ({value:e})")]
    NonPositiveSpectrum { index: usize, value: f64 },

    #[error("row {index} has zero norm and cannot be projected onto the unit sphere")]
    ZeroRow { index: usize },

    #[error("cannot form {k} clusters from {distinct} distinct rows")]
    TooFewDistinctRows { k: usize, distinct: usize },

    #[error("label {label} at vertex {index} is outside [0, {k})")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        k: usize,
    },

    #[error("center set is empty")]
    EmptyCenters,

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        reason: String,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(
        name: &'static str,
        value: impl ToString,
        reason: impl Into<String>,
    ) -> Self {
        Error::InvalidParameter {
            name,
            value: value.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
