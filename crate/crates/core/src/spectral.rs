//! Dimer parameters, bath spectral densities and the scalar quantities
//! derived from them.
//!
//! Units: `ħ = k_B = 1`, energies in ps⁻¹, times in ps. Couplings `λ_j` carry
//! units of energy^{1/2} so that `λ_j²` is an energy.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::gamma;

/// ħ in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.658_211_956_9;

/// 1 meV expressed in ps⁻¹.
pub const MEV_TO_PS_INV: f64 = 1.0 / HBAR_MEV_PS;

pub fn mev_to_ps_inv(e_mev: f64) -> f64 {
    e_mev * MEV_TO_PS_INV
}

pub fn ps_inv_to_mev(e_ps_inv: f64) -> f64 {
    e_ps_inv / MEV_TO_PS_INV
}

/// Site energy gap, tunnelling element, couplings and inverse temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub epsilon: f64,
    pub v: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub beta: f64,
}

impl DimerParams {
    pub fn new(epsilon: f64, v: f64, lambda1: f64, lambda2: f64, beta: f64) -> Result<Self> {
        let p = Self { epsilon, v, lambda1, lambda2, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        for (name, x) in [
            ("epsilon", self.epsilon),
            ("V", self.v),
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
        ] {
            if !x.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {x}")));
            }
        }
        Ok(())
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn with_v(self, v: f64) -> Self {
        Self { v, ..self }
    }

    pub fn with_couplings(self, lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2, ..self }
    }
}

/// `J(ω) = A_p ω^{2p+2} e^{-ω/ω_c}` for one reservoir.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralDensity {
    pub p: f64,
    pub omega_c: f64,
    pub a_p: f64,
}

impl SpectralDensity {
    pub fn new(p: f64, omega_c: f64, a_p: f64) -> Result<Self> {
        let s = Self { p, omega_c, a_p };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > -0.5 && self.p.is_finite()) {
            return Err(Error::InvalidParameter(format!("infrared exponent p must exceed -1/2, got {}", self.p)));
        }
        if !(self.omega_c > 0.0 && self.omega_c.is_finite()) {
            return Err(Error::InvalidParameter(format!("cutoff omega_c must be positive, got {}", self.omega_c)));
        }
        if !(self.a_p > 0.0 && self.a_p.is_finite()) {
            return Err(Error::InvalidParameter(format!("amplitude A_p must be positive, got {}", self.a_p)));
        }
        Ok(())
    }

    /// Amplitude for which `ν` equals `nu`.
    pub fn with_nu(p: f64, omega_c: f64, nu: f64) -> Result<Self> {
        let a_p = nu / (omega_c.powf(2.0 * p + 2.0) * gamma(2.0 * p + 2.0));
        Self::new(p, omega_c, a_p)
    }

    pub fn eval(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return Err(Error::Domain(format!("J(omega) requires omega >= 0, got {omega}")));
        }
        if omega == 0.0 {
            return Ok(0.0);
        }
        Ok(self.a_p * omega.powf(2.0 * self.p + 2.0) * (-omega / self.omega_c).exp())
    }

    /// `ν = ∫ J(ω)/ω dω = A_p ω_c^{2p+2} Γ(2p+2)`.
    pub fn nu(&self) -> f64 {
        self.a_p * self.omega_c.powf(2.0 * self.p + 2.0) * gamma(2.0 * self.p + 2.0)
    }

    /// `B = ∫ J(ω)/ω³ dω = A_p ω_c^{2p} Γ(2p)`; `None` when the integral
    /// diverges at `ω = 0` (`p <= 0`).
    pub fn b_coef(&self) -> Option<f64> {
        (self.p > 0.0).then(|| self.a_p * self.omega_c.powf(2.0 * self.p) * gamma(2.0 * self.p))
    }

    /// `η = β ω_c`.
    pub fn eta(&self, beta: f64) -> f64 {
        beta * self.omega_c
    }
}

/// Reservoir topology together with the spectral density of each bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralModel {
    /// One bath coupled to both sites.
    Collective(SpectralDensity),
    /// One independent bath per site.
    Local(SpectralDensity, SpectralDensity),
}

impl SpectralModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpectralModel::Collective(j) => j.validate(),
            SpectralModel::Local(j1, j2) => j1.validate().and(j2.validate()),
        }
    }

    /// Spectral density seen by site `j` (0 or 1).
    pub fn site(&self, j: usize) -> &SpectralDensity {
        match self {
            SpectralModel::Collective(d) => d,
            SpectralModel::Local(d1, d2) => {
                if j == 0 {
                    d1
                } else {
                    d2
                }
            }
        }
    }

    pub fn is_collective(&self) -> bool {
        matches!(self, SpectralModel::Collective(_))
    }
}

/// Scalars derived from the dimer and bath parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedScalars {
    /// `ν_j`; both entries equal for the collective bath.
    pub nu: [f64; 2],
    /// Renormalizations `α_j = 2 λ_j² ν_j / π`.
    pub alpha: [f64; 2],
    /// `ε̂ = ε - (α₁ - α₂)/2`.
    pub epsilon_hat: f64,
    /// `ε_{c,j} = 2ν/π (λ_j² - λ₁λ₂)`; collective bath only.
    pub eps_rec_collective: Option<[f64; 2]>,
    /// `ε_{l,j} = 2ν_j/π λ_j²`.
    pub eps_rec_local: [f64; 2],
    /// `B_j = ∫ J_j/ω³`, `None` where it diverges.
    pub b_coef: [Option<f64>; 2],
}

impl DerivedScalars {
    /// Reorganization energies appropriate to the model's topology.
    pub fn eps_rec(&self) -> [f64; 2] {
        self.eps_rec_collective.unwrap_or(self.eps_rec_local)
    }
}

pub fn derive_scalars(dimer: &DimerParams, model: &SpectralModel) -> Result<DerivedScalars> {
    dimer.validate()?;
    model.validate()?;
    let nu = [model.site(0).nu(), model.site(1).nu()];
    let (l1, l2) = (dimer.lambda1, dimer.lambda2);
    let alpha = [2.0 * l1 * l1 * nu[0] / PI, 2.0 * l2 * l2 * nu[1] / PI];
    let eps_rec_collective = model.is_collective().then(|| {
        let k = 2.0 * nu[0] / PI;
        [k * (l1 * l1 - l1 * l2), k * (l2 * l2 - l1 * l2)]
    });
    Ok(DerivedScalars {
        nu,
        alpha,
        epsilon_hat: dimer.epsilon - 0.5 * (alpha[0] - alpha[1]),
        eps_rec_collective,
        eps_rec_local: alpha,
        b_coef: [model.site(0).b_coef(), model.site(1).b_coef()],
    })
}

/// Parameters in units of the thermal energy: `ε = βε`, `ε^c_j = βε_{c,j}`,
/// `ε^l_j = βε_{l,j}`, `η_j = βω_{c,j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessParams {
    pub eps: f64,
    pub eps_c: Option<[f64; 2]>,
    pub eps_l: [f64; 2],
    pub eta: [f64; 2],
    pub p: [f64; 2],
}

impl DimensionlessParams {
    /// Collective-bath coordinates `x = (ε^c₁ - ε^c₂)/2`, `y = (ε^c₁ + ε^c₂)/2`.
    pub fn xy(&self) -> Option<(f64, f64)> {
        self.eps_c.map(|[a, b]| (0.5 * (a - b), 0.5 * (a + b)))
    }

    /// Dimensionless times `τ = t/β` for a grid of physical times.
    pub fn tau_grid(times: &[f64], beta: f64) -> Vec<f64> {
        times.iter().map(|t| t / beta).collect()
    }
}

pub fn to_dimensionless(dimer: &DimerParams, model: &SpectralModel) -> Result<DimensionlessParams> {
    let s = derive_scalars(dimer, model)?;
    let b = dimer.beta;
    Ok(DimensionlessParams {
        eps: b * dimer.epsilon,
        eps_c: s.eps_rec_collective.map(|[a, c]| [b * a, b * c]),
        eps_l: [b * s.eps_rec_local[0], b * s.eps_rec_local[1]],
        eta: [model.site(0).eta(b), model.site(1).eta(b)],
        p: [model.site(0).p, model.site(1).p],
    })
}

/// Inverse of [`to_dimensionless`] for a chosen `β`, `V` and bath strengths `ν_j`.
///
/// Only `λ₁ √A_p` is physically meaningful, so the amplitude is fixed by the
/// requested `ν_j` and the couplings follow from the reorganization energies.
/// For the collective bath the overall sign of `(λ₁, λ₂)` is chosen so that
/// `λ₁ >= λ₂`.
pub fn from_dimensionless(
    d: &DimensionlessParams,
    beta: f64,
    v: f64,
    nu: [f64; 2],
) -> Result<(DimerParams, SpectralModel)> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let density = |j: usize| SpectralDensity::with_nu(d.p[j], d.eta[j] / beta, nu[j]);
    match d.eps_c {
        Some([e1, e2]) => {
            let j = density(0)?;
            let k = 2.0 * nu[0] / PI;
            let sum = (e1 + e2) / beta;
            let diff = (e1 - e2) / beta;
            if sum < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "collective reorganization energies must have a non-negative sum, got {}",
                    e1 + e2
                )));
            }
            let (l1, l2) = if sum == 0.0 {
                if diff != 0.0 {
                    return Err(Error::InvalidParameter(
                        "equal couplings cannot produce unequal reorganization energies".into(),
                    ));
                }
                (0.0, 0.0)
            } else {
                let delta = (sum / k).sqrt();
                let sigma = diff / (k * delta);
                (0.5 * (sigma + delta), 0.5 * (sigma - delta))
            };
            let dimer = DimerParams::new(d.eps / beta, v, l1, l2, beta)?;
            Ok((dimer, SpectralModel::Collective(j)))
        }
        None => {
            let (j1, j2) = (density(0)?, density(1)?);
            let lam = |e: f64, n: f64| -> Result<f64> {
                if e < 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "local reorganization energies are non-negative, got {e}"
                    )));
                }
                Ok((e / beta * PI / (2.0 * n)).sqrt())
            };
            let dimer = DimerParams::new(d.eps / beta, v, lam(d.eps_l[0], nu[0])?, lam(d.eps_l[1], nu[1])?, beta)?;
            Ok((dimer, SpectralModel::Local(j1, j2)))
        }
    }
}

/// `J(ω) = π ρ(ω) |g(ω)|²` from a frequency density of modes and a form factor.
pub fn j_from_frequency_density<R, G>(rho: R, g: G, omega: f64) -> f64
where
    R: Fn(f64) -> f64,
    G: Fn(f64) -> Complex64,
{
    PI * rho(omega) * g(omega).norm_sqr()
}

/// `J(ω) = (π/2) ω² ∫_{S²} |g(ω, Σ)|² dΣ` for a three-dimensional reservoir,
/// with the solid-angle integral done numerically over `(θ, φ)`.
pub fn j_from_form_factor_3d<G>(g: G, omega: f64) -> Result<f64>
where
    G: Fn(f64, f64, f64) -> Complex64,
{
    let tol = Tolerance::new(1e-12, 1e-10);
    let over_phi = |theta: f64| -> f64 {
        quad::integrate(&|phi: f64| g(omega, theta, phi).norm_sqr(), 0.0, 2.0 * PI, tol)
            .map(|r| r.value * theta.sin())
            .unwrap_or(f64::NAN)
    };
    let sphere = quad::integrate(&over_phi, 0.0, PI, tol)?.value;
    Ok(0.5 * PI * omega * omega * sphere)
}

/// Isotropic special case of [`j_from_form_factor_3d`]: `J = 2π² ω² |g(ω)|²`.
pub fn j_isotropic<G>(g: G, omega: f64) -> f64
where
    G: Fn(f64) -> Complex64,
{
    2.0 * PI * PI * omega * omega * g(omega).norm_sqr()
}
