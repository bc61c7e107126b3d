use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("perfect conductors have no finite medium response; use the perfect-conductor operator path")]
    PerfectConductor,

    #[error("{0} diverges at kappa = 0; use the static (n = 0) formulation")]
    StaticLimit(&'static str),

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("separation must be positive, got {0}")]
    NonPositiveSeparation(f64),

    #[error("1 - K is singular for body {0}")]
    SingularSelfOperator(usize),

    #[error("det(1 - N) = {0} is not positive")]
    NonPositiveDeterminant(f64),

    #[error("negative radicand {0} in the plate eigenvalue formula")]
    NegativeRadicand(f64),

    #[error("under-resolved discretization: {0}")]
    Resolution(String),

    #[error("geometry and surface-charge discretization do not match")]
    GeometryMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be positive and finite, got {value}")))
    }
}
