use thiserror::Error;

/// Errors produced by domain validation and singular inversions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A gamma accuracy factor lies outside [-1, 1].
    #[error("gamma factor {0} lies outside [-1, 1]")]
    GammaOutOfRange(f64),

    /// Gamma factors too large for a positive joint-measurement realization.
    #[error("infeasible gamma factors: {0}")]
    InfeasibleGammas(String),

    /// Inversion requested for a rank-deficient (gamma = 0) kernel.
    #[error("singular inversion: gamma factor is zero")]
    SingularInversion,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid measurement settings: {0}")]
    InvalidSettings(String),

    /// An outcome component that is not +1 or -1.
    #[error("invalid outcome component {0}, expected +1 or -1")]
    InvalidOutcome(i8),

    #[error("domain error: {0}")]
    Domain(String),

    /// A continuous approximation collapsed to zero width.
    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
