//! Floquet–Markov master equation for a two-level atom driven by a strong
//! laser field and weakly coupled to heat baths.
//!
//! The crate builds the time-periodic propagator in closed form, decomposes
//! the σ¹ and σ³ couplings into transition operators between dressed states,
//! assembles the interaction-picture LGKS generator from bath spectral
//! densities and evaluates two applications on top of it: the resonance
//! fluorescence (Mollow) spectrum and the stationary thermodynamics of the
//! laser-driven heat pump. Every closed form has an independent numeric oracle
//! next to it, and [`verify`] runs all of them as randomized suites.

pub mod algebra;
pub mod dissipator;
pub mod error;
pub mod floquet;
pub mod ode;
pub mod random;
pub mod spectroscopy;
pub mod thermo;
pub mod transitions;
pub mod verify;

pub use algebra::{Basis, Operator2, SuperOp};
pub use dissipator::{BathSpec, Channel, DensityMatrix, Generator, SpectralDensity};
pub use error::{Error, Result};
pub use floquet::{DressedBasis, SystemParams};
pub use transitions::{TransitionOperator, TransitionSet};
