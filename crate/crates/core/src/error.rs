use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the dynamics, Floquet and experiment layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate system: delta_z = delta_x = 0 leaves the mixing angle undefined")]
    DegenerateSystem,

    #[error("required integration step {step:e} s fell below the floor {floor:e} s")]
    StepUnderflow { step: f64, floor: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error(
        "drive frequency {omega:e} rad/s is not near the order-{order} resonance {target:e} rad/s"
    )]
    NotNearResonance { omega: f64, order: u32, target: f64 },

    #[error("no contrast peak found: contrast varies by only {variation:.4} across the window")]
    NoPeakFound { variation: f64 },

    #[error(
        "filter bands overlap: Raman frequency {raman:e} rad/s exceeds a quarter of the gap {gap:e} rad/s"
    )]
    FilterBandsOverlap { raman: f64, gap: f64 },

    #[error("fit failed: {0}")]
    FitFailed(String),
}
