//! Population and coherence dynamics of a biased two-site system coupled to
//! harmonic reservoirs with super-Ohmic, Ohmic or sub-Ohmic spectral
//! densities `J(ω) = A_p ω^{2p+2} e^{-ω/ω_c}`.
//!
//! The crate provides the bath correlation kernels in closed form and by
//! direct quadrature, the non-perturbative hopping rate together with its
//! Marcus-type approximations, populations and coherences in time, regime
//! diagnostics, and a Monte-Carlo noise oracle for the dephasing factor.

pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod kernels;
pub mod noise_oracle;
pub mod quad;
pub mod rates;
pub mod regimes;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
