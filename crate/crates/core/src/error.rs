use thiserror::Error;

use crate::algebra::Basis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operands live in different bases ({left} vs {right})")]
    BasisMismatch { left: Basis, right: Basis },

    #[error("operator is not Hermitian (max |M - M†| = {0:e})")]
    NotHermitian(f64),

    #[error("rate must be non-negative, got {0}")]
    NegativeRate(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("Rabi frequency {rabi} exceeds drive frequency {drive}; the model assumes Omega_R <= Omega")]
    RabiExceedsDrive { rabi: f64, drive: f64 },

    #[error("averaged Hamiltonian vanishes (g = 0 and detuning = 0); the dressed basis is undefined")]
    DegenerateHamiltonian,

    #[error("frequency collision: {0}")]
    FrequencyCollision(String),

    #[error("generator has a degenerate kernel (singular values {0:?}); stationary state is not unique")]
    DegenerateStationary(Vec<f64>),

    #[error("spectral density is negative ({value}) at omega = {omega}")]
    NegativeDensity { omega: f64, value: f64 },

    #[error("bath '{label}' uses channel {expected:?} but the operator belongs to {found:?}")]
    ChannelMismatch {
        label: String,
        expected: crate::dissipator::Channel,
        found: crate::dissipator::Channel,
    },

    #[error("bath configuration: {0}")]
    BathConfig(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("correlation horizon too short: remainder {remainder:e} relative to initial value")]
    HorizonTooShort { remainder: f64 },

    #[error("small-detuning conditions violated: {}", .0.join("; "))]
    ConditionsViolated(Vec<String>),
}

impl Error {
    /// True for failures caused by numerically degenerate parameter points
    /// rather than malformed input.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateHamiltonian
                | Error::FrequencyCollision(_)
                | Error::DegenerateStationary(_)
                | Error::HorizonTooShort { .. }
        )
    }
}
