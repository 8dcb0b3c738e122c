use thiserror::Error;

use crate::units::UnitMode;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("negative duration {0}")]
    NegativeTime(f64),

    #[error("noise variance must be positive, got {0}")]
    NonPositiveNoise(f64),

    #[error("static channel: the Hamiltonian has no off-diagonal coupling or level gap, so there is no period")]
    StaticChannel,

    #[error("r0 = {0} exceeds 1/2; inputs would swap roles")]
    BiasAboveHalf(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty grid")]
    EmptyGrid,

    #[error("grid size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("domain too small: {tail_mass:e} of the probability mass falls outside the grid")]
    DomainTooSmall { tail_mass: f64 },

    #[error("unit mode mismatch: state is {state:?}, constants are {constants:?}")]
    UnitMismatch { state: UnitMode, constants: UnitMode },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
