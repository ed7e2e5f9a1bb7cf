use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid array geometry: {0}")]
    InvalidGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("beamformer must have unit norm, got {0}")]
    NonUnitBeamformer(f64),

    #[error("infeasible attack: {0}")]
    InfeasibleAttack(String),

    #[error("attacker needs unbounded antennas (K1 = {k1} is below the floor)")]
    UnboundedAntennas { k1: f64 },

    #[error("attacker has {n1} antennas but the unconstrained optimum needs {n1_star}")]
    ConstrainedRegime { n1: usize, n1_star: usize },

    #[error("prior probability must lie in (0, 1), got {0}")]
    InvalidPrior(f64),

    #[error("infeasible attack track at slot {slot}: {reason}")]
    InfeasibleTrack { slot: usize, reason: String },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors that come from an attack or track that cannot be built
    /// for the given scenario, as opposed to malformed input.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::InfeasibleAttack(_)
                | Error::UnboundedAntennas { .. }
                | Error::ConstrainedRegime { .. }
                | Error::InfeasibleTrack { .. }
        )
    }
}
