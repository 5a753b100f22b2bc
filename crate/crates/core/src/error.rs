use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter set violates a structural rule (zero detuning, empty chain).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The perturbative expansion behind a coefficient formula is undefined.
    #[error("singular regime: {0}")]
    SingularRegime(String),

    #[error("Hilbert space dimension {dimension} exceeds the cap {cap}")]
    DimensionTooLarge { dimension: u128, cap: usize },

    #[error("invalid basis label: {0}")]
    InvalidLabel(String),

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("operator error: {0}")]
    Operator(String),

    #[error("integrator step underflow at t = {t} (step {step:e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("parameter validation failed (overall {})", .0.overall)]
    ValidationFailed(Box<ValidationReport>),

    #[error("config error: {0}")]
    Config(String),

    #[error("unknown channel `{0}`")]
    UnknownChannel(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
