use thiserror::Error;

/// Errors produced by the analytics, the Monte Carlo engine and the oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("time {t} lies beyond the tabulated grid end {end}")]
    OutOfRange { t: f64, end: f64 },

    #[error("probability {0} is 0 or 1; the Fisher information is singular there")]
    SingularProbability(f64),

    #[error("degenerate detuning: signal frequency is zero, no phase accumulates")]
    DegenerateDetuning,

    #[error("optimization failed: {0}")]
    OptimizationFailed(String),

    #[error("cannot pair {0} qubits: each unentangled probe needs its own auxiliary")]
    Pairing(usize),

    #[error("phase policy error: {0}")]
    Policy(String),

    #[error("local error estimate {estimate:.3e} at t = {t} exceeds {limit:.1e}; reduce the step")]
    StepSize { t: f64, estimate: f64, limit: f64 },

    #[error("index error: {0}")]
    Index(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
