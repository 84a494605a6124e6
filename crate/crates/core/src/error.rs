use thiserror::Error;

/// Errors produced by the dressed-atom computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Zero detuning and zero field: the generalized Rabi frequency vanishes
    /// and the dressed basis is undefined.
    #[error("degenerate dressing: detuning and field amplitude are both zero")]
    DegenerateDressing,

    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("ensemble must contain at least one atom")]
    EmptyEnsemble,

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("ill-conditioned spectral fit (condition number {condition:.3e})")]
    IllConditionedFit { condition: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
