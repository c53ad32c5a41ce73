//! Entanglement-free cloning: maps whose two outputs are an exact tensor
//! product of shrunk copies of the input.
//!
//! * [`efc_apply`]: the four-state protocol for `α χ(z) + (1 - α) I/2`,
//!   producing two copies shrunk by a further factor of 9.
//! * [`efco2_apply`]: two orthogonal basis states, halving the shrink.
//! * [`efc2_apply`]: two non-orthogonal pure states at angle `θ`.
//! * [`experimental`]: any two mixed states; not normative.

mod alpha;
pub mod experimental;
mod two_state;

pub use alpha::{efc_apply, efc_joint, efc_pair_distribution, EfcAlphaParams, PairDistribution};
pub use two_state::{efc2_apply, efco2_apply, psi as two_state_ket, Efc2Output, Efco2Output};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EfcError {
    #[error("shrinking factor {0} is outside (0, 1]")]
    AlphaOutOfRange(String),
    #[error("parameter p = {0} is outside (0, 1]")]
    POutOfRange(String),
    #[error("angle {0} is outside [0, π/4)")]
    ThetaOutOfRange(f64),
    #[error("bit {0} is not 0 or 1")]
    BadBit(u8),
    #[error("the two states coincide; there is nothing to distinguish")]
    IdenticalStates,
    #[error("internal identity failed: {0}")]
    Inconsistent(String),
    #[error("{what}: residual {value:e} exceeds {tolerance:e}")]
    Residual {
        what: &'static str,
        value: f64,
        tolerance: f64,
    },
}
