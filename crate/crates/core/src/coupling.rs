//! Reservoir coupling expressed through the dimensionless kernels.
//!
//! Both topologies reduce to a bias frequency `a = βε̂` and a list of
//! channels, each pairing a kernel set with the weights that multiply
//! `𝒬₁` and `𝒬₂` in the rate integrand and in the coherence factor. For the
//! collective bath there is one channel with damping and rate-phase weight
//! `y = (ε^c₁ + ε^c₂)/2` and coherence-phase weight `x = (ε^c₁ - ε^c₂)/2`;
//! for local baths channel `j` carries `ε^l_j/2` with the coherence phase
//! of site 2 entering with a minus sign.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernels::{KernelSet, ModelKernels};
use crate::spectral::{to_dimensionless, DimerParams, SpectralModel};

#[derive(Debug, Clone)]
pub struct Channel {
    pub kernels: Arc<KernelSet>,
    /// Weight of `𝒬₂` in the exponent `Γ(τ)`.
    pub damping: f64,
    /// Weight of `𝒬₁` inside the cosine of the rate integrand.
    pub rate_phase: f64,
    /// Weight of `𝒬₁` in the phase of the coherence factor.
    pub coherence_phase: f64,
}

/// Kernel contributions at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValues {
    /// `Γ(τ)`
    pub damping: f64,
    /// `Φ(τ)` of the rate integrand.
    pub rate_phase: f64,
    /// Phase of the coherence factor.
    pub coherence_phase: f64,
}

#[derive(Debug, Clone)]
pub struct CouplingProfile {
    /// `a = βε̂`.
    pub eps_eff: f64,
    pub beta: f64,
    pub channels: Vec<Channel>,
    pub collective: bool,
}

impl CouplingProfile {
    pub fn new(dimer: &DimerParams, model: &SpectralModel, kernels: &ModelKernels) -> Result<Self> {
        let d = to_dimensionless(dimer, model)?;
        for j in 0..2 {
            let ks = kernels.site(j);
            if ks.density() != model.site(j) {
                return Err(Error::InvalidParameter(format!(
                    "kernel set for site {} was built for a different spectral density",
                    j + 1
                )));
            }
            if ks.beta() != dimer.beta {
                return Err(Error::InvalidParameter(format!(
                    "kernel set beta {} differs from the dimer beta {}",
                    ks.beta(),
                    dimer.beta
                )));
            }
        }
        if kernels.is_collective() != model.is_collective() {
            return Err(Error::InvalidParameter("kernel topology differs from the spectral model".into()));
        }
        let (eps_eff, channels) = match d.xy() {
            Some((x, y)) => (
                d.eps - x,
                vec![Channel { kernels: kernels.site(0).clone(), damping: y, rate_phase: y, coherence_phase: x }],
            ),
            None => {
                let [l1, l2] = d.eps_l;
                let ch = |j: usize, w: f64, sign: f64| Channel {
                    kernels: kernels.site(j).clone(),
                    damping: w,
                    rate_phase: w,
                    coherence_phase: sign * w,
                };
                (d.eps - 0.5 * (l1 - l2), vec![ch(0, 0.5 * l1, 1.0), ch(1, 0.5 * l2, -1.0)])
            }
        };
        Ok(Self { eps_eff, beta: dimer.beta, channels, collective: model.is_collective() })
    }

    /// Same channels with a different bias frequency.
    pub fn with_eps_eff(&self, eps_eff: f64) -> Self {
        Self { eps_eff, ..self.clone() }
    }

    fn active(&self) -> impl Iterator<Item = &Channel> {
        self.channels
            .iter()
            .filter(|c| c.damping != 0.0 || c.rate_phase != 0.0 || c.coherence_phase != 0.0)
    }

    pub fn values(&self, tau: f64) -> Result<ProfileValues> {
        let mut v = ProfileValues { damping: 0.0, rate_phase: 0.0, coherence_phase: 0.0 };
        for c in self.active() {
            let (q1, q2) = c.kernels.eval(tau)?;
            v.damping += c.damping * q2;
            v.rate_phase += c.rate_phase * q1;
            v.coherence_phase += c.coherence_phase * q1;
        }
        Ok(v)
    }

    /// `Γ(τ)`.
    pub fn damping(&self, tau: f64) -> Result<f64> {
        self.values(tau).map(|v| v.damping)
    }

    /// `Γ∞`, or `None` when it diverges (a coupled channel with `p <= 0`).
    pub fn gamma_infinity(&self) -> Result<Option<f64>> {
        let mut total = 0.0;
        for c in self.channels.iter().filter(|c| c.damping != 0.0) {
            match c.kernels.q0() {
                Ok(q0) => total += c.damping * q0,
                Err(Error::Divergent(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(total))
    }

    /// `Γ∞ - Γ(τ)` for the saturating case.
    pub fn damping_deficit(&self, tau: f64) -> Result<f64> {
        let mut total = 0.0;
        for c in self.channels.iter().filter(|c| c.damping != 0.0) {
            total += c.damping * c.kernels.q2_deficit(tau)?;
        }
        Ok(total)
    }

    /// Coherence factor `D(τ) = exp(-iΘ(τ) - Γ(τ))` of the uncoupled dimer.
    pub fn decoherence_factor(&self, tau: f64) -> Result<Complex64> {
        let v = self.values(tau)?;
        Ok(Complex64::from_polar((-v.damping).exp(), -v.coherence_phase))
    }

    /// Smallest infrared exponent among coupled channels.
    pub fn min_p(&self) -> f64 {
        self.channels
            .iter()
            .filter(|c| c.damping != 0.0)
            .map(|c| c.kernels.p())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest `η` among coupled channels.
    pub fn min_eta(&self) -> f64 {
        self.channels
            .iter()
            .filter(|c| c.damping != 0.0)
            .map(|c| c.kernels.eta())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_uncoupled(&self) -> bool {
        self.active().next().is_none()
    }
}
