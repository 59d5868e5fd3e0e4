use thiserror::Error;

/// Errors raised by the simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid topology: {0}")]
    InvalidTopology(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(
        "near-defective generator (residual {residual:.3e}, condition {condition:.3e}); use the expm path"
    )]
    NearDefective { residual: f64, condition: f64 },

    #[error("eigenvalue iteration did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("singular matrix in linear solve")]
    Singular,

    #[error("negative time {0} is only allowed for undamped generators")]
    NegativeTime(f64),

    #[error("no transfer in window: best candidate tau={best_tau} with |Theta_N1|^2={best_p}")]
    NoTransferInWindow { best_tau: f64, best_p: f64 },

    #[error("no exchange time satisfying both spectral conditions in window")]
    NoSpectralRoot,

    #[error("numerical consistency: imaginary residue {0:.3e} in a real-valued trace")]
    NumericalConsistency(f64),

    #[error("Fock truncation defect {defect:.3e} exceeds {limit:.1e}; raise the cutoff or lower the amplitude")]
    Truncation { defect: f64, limit: f64 },

    #[error("trace drift {0:.3e} exceeded tolerance; reduce the integration step")]
    StepSize(f64),

    #[error("oracle guardrail: {0}")]
    Guardrail(String),
}

pub type Result<T> = std::result::Result<T, Error>;
