//! Populations and coherences in time.
//!
//! Trajectories are the main terms of the weak-tunnelling expansion:
//!
//! ```text
//! p(t)   = p∞ + e^{-γt}(p(0) - p∞)
//! ρ₁₂(t) = e^{-γt/2} e^{-it(ε̂ + x_LS)} e^{-Γ∞} ρ₁₂(0)
//! ```
//!
//! with `p∞ = 1/(1 + e^{βε̂})`. Remainder terms are not modelled. At `V = 0`
//! the coherence is known exactly, `ρ₁₂(t) = e^{-iε̂t} D(t) ρ₁₂(0)`.

use num_complex::Complex64;

use crate::coupling::CouplingProfile;
use crate::error::{Error, Result};
use crate::spectral::{DerivedScalars, DimerParams};

/// `1/(1 + e^{βε̂})`.
pub fn equilibrium_population(dimer: &DimerParams, scalars: &DerivedScalars) -> f64 {
    logistic(-dimer.beta * scalars.epsilon_hat)
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Saturation exponent of the `V = 0` coherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaInfinity {
    Finite(f64),
    /// Infrared-divergent: full decoherence (`p <= 0` with nonzero coupling).
    Divergent,
}

impl GammaInfinity {
    pub fn value(self) -> Option<f64> {
        match self {
            GammaInfinity::Finite(g) => Some(g),
            GammaInfinity::Divergent => None,
        }
    }

    /// `e^{-Γ∞}`, zero when divergent.
    pub fn saturation(self) -> f64 {
        self.value().map_or(0.0, |g| (-g).exp())
    }
}

pub fn gamma_infinity(profile: &CouplingProfile) -> Result<GammaInfinity> {
    Ok(match profile.gamma_infinity()? {
        Some(g) => GammaInfinity::Finite(g),
        None => GammaInfinity::Divergent,
    })
}

/// `D(t)` at physical time `t`.
pub fn decoherence_factor(profile: &CouplingProfile, t: f64) -> Result<Complex64> {
    profile.decoherence_factor(t / profile.beta)
}

/// `Γ(τ)` at dimensionless time `τ = t/β`.
pub fn damping_exponent(profile: &CouplingProfile, tau: f64) -> Result<f64> {
    profile.damping(tau)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMode {
    /// Main term of the `V ≠ 0` expansion.
    MainTerm,
    /// Exact `V = 0` evolution with the coherence factor `D(t)`.
    ExactUncoupled,
}

/// Time series on a grid of physical times. Series that were not requested
/// are empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub p: Vec<f64>,
    pub rho12_abs: Vec<f64>,
    pub rho12_phase: Vec<f64>,
    /// `e^{-γt/2}`.
    pub envelope: Vec<f64>,
    /// `|D(t)|`.
    pub d_factor: Vec<f64>,
    /// `Γ(t/β)`.
    pub gamma_of_tau: Vec<f64>,
    pub initial_population: Option<f64>,
    pub initial_coherence: Option<Complex64>,
}

impl Trajectory {
    fn on(times: &[f64]) -> Self {
        Self {
            times: times.to_vec(),
            p: Vec::new(),
            rho12_abs: Vec::new(),
            rho12_phase: Vec::new(),
            envelope: Vec::new(),
            d_factor: Vec::new(),
            gamma_of_tau: Vec::new(),
            initial_population: None,
            initial_coherence: None,
        }
    }

    /// Population of the second level, `1 - p(t)`.
    pub fn q(&self) -> Vec<f64> {
        self.p.iter().map(|p| 1.0 - p).collect()
    }

    /// `ρ₂₁ = conj(ρ₁₂)`.
    pub fn rho21(&self) -> Vec<Complex64> {
        self.rho12_abs
            .iter()
            .zip(&self.rho12_phase)
            .map(|(&r, &ph)| Complex64::from_polar(r, -ph))
            .collect()
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(Error::InvalidParameter(format!("time grid entries must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("rate must be finite and >= 0, got {gamma}")));
    }
    Ok(())
}

/// `p(t) = p∞ + e^{-γt}(p0 - p∞)`.
pub fn population_trajectory(
    dimer: &DimerParams,
    scalars: &DerivedScalars,
    gamma: f64,
    p0: f64,
    times: &[f64],
) -> Result<Trajectory> {
    check_rate(gamma)?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidParameter(format!("initial population must lie in [0, 1], got {p0}")));
    }
    check_times(times)?;
    let p_inf = equilibrium_population(dimer, scalars);
    let mut tr = Trajectory::on(times);
    tr.p = times
        .iter()
        .map(|&t| if t == 0.0 { p0 } else { p_inf + (-gamma * t).exp() * (p0 - p_inf) })
        .collect();
    tr.envelope = times.iter().map(|&t| (-0.5 * gamma * t).exp()).collect();
    tr.initial_population = Some(p0);
    Ok(tr)
}

/// Coherence `ρ₁₂(t)`; `gamma` and `lamb_shift` are ignored in
/// [`CoherenceMode::ExactUncoupled`], where `x_LS = 0`.
#[allow(clippy::too_many_arguments)]
pub fn coherence_trajectory(
    dimer: &DimerParams,
    scalars: &DerivedScalars,
    profile: &CouplingProfile,
    gamma: f64,
    lamb_shift: f64,
    rho12_0: Complex64,
    times: &[f64],
    mode: CoherenceMode,
) -> Result<Trajectory> {
    check_times(times)?;
    let beta = profile.beta;
    let mut tr = Trajectory::on(times);
    tr.initial_coherence = Some(rho12_0);
    let mut d = Vec::with_capacity(times.len());
    for &t in times {
        let tau = t / beta;
        let v = profile.values(tau)?;
        tr.gamma_of_tau.push(v.damping);
        d.push(Complex64::from_polar((-v.damping).exp(), -v.coherence_phase));
    }
    tr.d_factor = d.iter().map(|z| z.norm()).collect();

    let rho: Vec<Complex64> = match mode {
        CoherenceMode::ExactUncoupled => {
            if dimer.v != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "exact uncoupled evolution needs V = 0, got V = {}",
                    dimer.v
                )));
            }
            times
                .iter()
                .zip(&d)
                .map(|(&t, dz)| Complex64::from_polar(1.0, -scalars.epsilon_hat * t) * dz * rho12_0)
                .collect()
        }
        CoherenceMode::MainTerm => {
            check_rate(gamma)?;
            let sat = match gamma_infinity(profile)? {
                GammaInfinity::Finite(g) => (-g).exp(),
                GammaInfinity::Divergent => {
                    return Err(Error::Divergent(
                        "saturation exponent diverges (p <= 0 with nonzero coupling): the coherence main term \
                         is undefined; use the exact V = 0 evolution or report the modulus only"
                            .into(),
                    ))
                }
            };
            let omega = scalars.epsilon_hat + lamb_shift;
            tr.envelope = times.iter().map(|&t| (-0.5 * gamma * t).exp()).collect();
            times
                .iter()
                .zip(&tr.envelope)
                .map(|(&t, &env)| Complex64::from_polar(env * sat, -omega * t) * rho12_0)
                .collect()
        }
    };
    tr.rho12_abs = rho.iter().map(|z| z.norm()).collect();
    tr.rho12_phase = rho.iter().map(|z| z.arg()).collect();
    Ok(tr)
}

/// Least-squares slope of `ln y` against `t` over points with `y > 0`.
pub fn fit_log_slope(times: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(_, &y)| y > 0.0)
        .map(|(&t, &y)| (t, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{KernelMethod, ModelKernels};
    use crate::spectral::{derive_scalars, SpectralDensity, SpectralModel};
    use approx::assert_relative_eq;

    fn collective(p: f64, l1: f64, l2: f64, v: f64) -> (DimerParams, DerivedScalars, CouplingProfile) {
        let dimer = DimerParams::new(2.0, v, l1, l2, 1.0).unwrap();
        let model = SpectralModel::Collective(SpectralDensity::with_nu(p, 0.5, 1.0).unwrap());
        let k = ModelKernels::new(&model, 1.0, KernelMethod::ClosedForm).unwrap();
        let s = derive_scalars(&dimer, &model).unwrap();
        let prof = CouplingProfile::new(&dimer, &model, &k).unwrap();
        (dimer, s, prof)
    }

    #[test]
    fn logistic_values() {
        assert_eq!(logistic(0.0), 0.5);
        assert_relative_eq!(logistic(-0.1), 0.47502081252106, max_relative = 1e-12);
        assert!(logistic(-800.0) == 0.0 && logistic(800.0) == 1.0);
    }

    #[test]
    fn population_half_life() {
        let (dimer, s, _) = collective(0.5, 0.3, -0.2, 1.0);
        let g = 0.7;
        let t = [0.0, std::f64::consts::LN_2 / g, 1e4];
        let tr = population_trajectory(&dimer, &s, g, 0.9, &t).unwrap();
        let pinf = equilibrium_population(&dimer, &s);
        assert_eq!(tr.p[0], 0.9);
        assert_relative_eq!(tr.p[1], pinf + 0.5 * (0.9 - pinf), max_relative = 1e-14);
        assert_relative_eq!(tr.p[2], pinf, max_relative = 1e-14);
        assert!(population_trajectory(&dimer, &s, -1.0, 0.5, &t).is_err());
        assert!(population_trajectory(&dimer, &s, 1.0, 1.5, &t).is_err());
    }

    #[test]
    fn symmetric_coupling_is_pure_phase() {
        let (dimer, s, prof) = collective(0.5, 0.4, 0.4, 0.0);
        let t: Vec<f64> = (0..20).map(|k| k as f64 * 0.7).collect();
        let tr = coherence_trajectory(&dimer, &s, &prof, 0.0, 0.0, Complex64::new(0.5, 0.0), &t, CoherenceMode::ExactUncoupled)
            .unwrap();
        for (k, &t) in t.iter().enumerate() {
            assert_relative_eq!(tr.rho12_abs[k], 0.5, max_relative = 1e-14);
            let expected = Complex64::from_polar(1.0, -s.epsilon_hat * t).arg();
            assert!((tr.rho12_phase[k] - expected).abs() < 1e-12);
        }
        assert_eq!(gamma_infinity(&prof).unwrap(), GammaInfinity::Finite(0.0));
    }

    #[test]
    fn main_term_requires_finite_saturation() {
        let (dimer, s, prof) = collective(-0.25, 0.5, -0.5, 1.0);
        assert_eq!(gamma_infinity(&prof).unwrap(), GammaInfinity::Divergent);
        let err = coherence_trajectory(&dimer, &s, &prof, 0.1, 0.0, Complex64::new(0.5, 0.0), &[0.0, 1.0], CoherenceMode::MainTerm);
        assert!(matches!(err, Err(Error::Divergent(_))));
    }

    #[test]
    fn exact_mode_rejects_tunnelling() {
        let (dimer, s, prof) = collective(0.5, 0.5, -0.5, 1.0);
        let r = coherence_trajectory(&dimer, &s, &prof, 0.0, 0.0, Complex64::new(0.5, 0.0), &[1.0], CoherenceMode::ExactUncoupled);
        assert!(r.is_err());
    }

    #[test]
    fn log_slope_fit() {
        let t: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (-0.25 * t).exp()).collect();
        assert_relative_eq!(fit_log_slope(&t, &y).unwrap(), -0.25, max_relative = 1e-12);
        assert!(fit_log_slope(&[1.0], &[1.0]).is_none());
    }
}
