use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("classical turning point: V({x}) = {potential} >= E = {energy}")]
    TurningPoint { x: f64, potential: f64, energy: f64 },

    #[error("no propagating mode: E = {energy} <= asymptotic potential {asymptote}")]
    NoPropagatingMode { energy: f64, asymptote: f64 },

    #[error("potential tail at x = {x} deviates from its asymptote by {deviation} (tolerance {tolerance})")]
    NonDecayingTail { x: f64, deviation: f64, tolerance: f64 },

    #[error("auxiliary phase derivative vanishes at x = {x}")]
    PhaseDerivativeZero { x: f64 },

    #[error("asymptotes differ: V(-inf) = {v_minus}, V(+inf) = {v_plus}")]
    AsymmetricAsymptotes { v_minus: f64, v_plus: f64 },

    #[error("integration tolerance not met: {reason}")]
    ToleranceNotMet { reason: String },

    #[error("energy {energy} does not exceed the barrier height {barrier}")]
    UnderBarrier { energy: f64, barrier: f64 },

    #[error("extrema profile does not alternate between peaks and valleys at index {index}")]
    NonAlternatingProfile { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not admissible: {0}")]
    Inadmissible(String),

    #[error("config error: {0}")]
    Config(String),
}

impl ScatterError {
    /// Stable machine-readable code, used in CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            ScatterError::TurningPoint { .. } => "TurningPoint",
            ScatterError::NoPropagatingMode { .. } => "NoPropagatingMode",
            ScatterError::NonDecayingTail { .. } => "NonDecayingTail",
            ScatterError::PhaseDerivativeZero { .. } => "PhaseDerivativeZero",
            ScatterError::AsymmetricAsymptotes { .. } => "AsymmetricAsymptotes",
            ScatterError::ToleranceNotMet { .. } => "ToleranceNotMet",
            ScatterError::UnderBarrier { .. } => "UnderBarrier",
            ScatterError::NonAlternatingProfile { .. } => "NonAlternatingProfile",
            ScatterError::InvalidParameter(_) => "InvalidParameter",
            ScatterError::Inadmissible(_) => "Inadmissible",
            ScatterError::Config(_) => "ConfigError",
        }
    }
}

pub type Result<T> = std::result::Result<T, ScatterError>;
