use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` must be {requirement}, got {value}")]
    NonPositiveParameter {
        name: &'static str,
        requirement: &'static str,
        value: f64,
    },

    #[error("overdamped or critically damped oscillator (beta = {beta}, omega = {omega}) is not supported; need beta < 2 omega")]
    OverdampedUnsupported { beta: f64, omega: f64 },

    #[error("noise strength {mu} is not thermally consistent with 2 m beta Theta = {expected}")]
    ThermalInconsistency { mu: f64, expected: f64 },

    #[error("operation requires friction (beta > 0)")]
    RequiresFriction,

    #[error("negative duration {0}")]
    NegativeTime(f64),

    #[error("degenerate covariance: {0}")]
    DegenerateCovariance(&'static str),

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}, tolerance {tolerance:e} after {subdivisions} subdivisions")]
    QuadratureNotConverged {
        estimate: f64,
        error: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("matrix size {size} exceeds the supported limit {limit}")]
    SizeTooLarge { size: usize, limit: usize },

    #[error("eigenvalue iteration did not converge for index {index} after {iterations} sweeps")]
    ConvergenceFailure { index: usize, iterations: usize },

    #[error("time step omega*dt = {0} exceeds 0.1")]
    StepTooLarge(f64),

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
