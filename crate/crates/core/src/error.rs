use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("operation requires {required}, but beta = {beta}")]
    WrongRegime { required: &'static str, beta: f64 },

    #[error("quadrature did not converge: error estimate {achieved:.3e} exceeds target {target:.3e}")]
    QuadratureNonConvergence { achieved: f64, target: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("mass mismatch: field mass {field:.6e} vs reference mass {reference:.6e}")]
    MassMismatch { field: f64, reference: f64 },

    #[error("negative density: {0}")]
    NegativeDensity(String),

    #[error("initial data support [0, {support}] exceeds grid length {length}")]
    SupportExceedsDomain { support: f64, length: f64 },

    #[error("tridiagonal solve failed: {0}")]
    TridiagonalSolve(String),

    #[error("rate fit rejected: {0}")]
    RateFit(String),
}

impl CoreError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        CoreError::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
