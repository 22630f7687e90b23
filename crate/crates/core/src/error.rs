//! Error type shared by all kernels.

use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operands live on different grids or time axes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A parameter is outside its admissible range; the message names the
    /// violated inequality.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// Evaluation point outside the function's domain.
    #[error("outside domain: {0}")]
    Domain(String),
    /// A stated precondition of the operation does not hold for the input.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// Rejected input data (e.g. incompatible boundary/initial values).
    #[error("rejected input: {0}")]
    RejectedInput(String),
    /// Time stepping produced a non-finite value.
    #[error("solver diverged at step {step}: non-finite value")]
    Diverged { step: usize },
    /// Bad run configuration (resolutions, missing pieces).
    #[error("configuration error: {0}")]
    Config(String),
    /// Gauss-Legendre order too low for the requested coefficient tables.
    #[error("quadrature residual {residual:e} exceeds {tolerance:e}; raise the order")]
    QuadratureOrder { residual: f64, tolerance: f64 },
    /// An internal consistency identity failed beyond tolerance.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
