use thiserror::Error;

/// Errors produced by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("non-finite state encountered: {0}")]
    NonFiniteState(String),

    #[error("step size underflow at tau = {tau:.6e} (stiff blowup?); last good state recorded")]
    StepUnderflow { tau: f64, last_state: Vec<f64> },

    #[error("degenerate steady state: delta, gamma_a and n*cos(xi) all vanish")]
    DegenerateSteadyState,

    #[error("no trapped oscillation: squared trap frequency is negative ({0:.6e})")]
    NoTrappedOscillation(f64),

    #[error("zero force derivative at p_s = {0}; transition time undefined")]
    ZeroForceDerivative(f64),

    #[error("photon number must be positive, got {0}")]
    ZeroPhotonNumber(f64),

    #[error("all grid points trapped; ballistic regime requires |p| above roughly {p_cr_bound}")]
    AllPointsTrapped { p_cr_bound: f64 },

    #[error("trajectory unusable for spectrum: {0}")]
    SpectrumResolution(String),

    #[error("no scaling window for box counting: {0}")]
    NoScalingWindow(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
