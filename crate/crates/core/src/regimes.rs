//! Validity diagnostics for the approximate rate formulas and for the
//! perturbative expansion in the tunnelling element `V`.
//!
//! A "≪" inequality `small ≪ large` is reported with both sides and the
//! ratio `small/large`: at most [`MUCH_LESS_THRESHOLD`] is satisfied, below 1
//! marginal, otherwise violated.

use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{DerivedScalars, DimerParams, SpectralModel};

/// Ratio below which `a ≪ b` counts as satisfied.
pub const MUCH_LESS_THRESHOLD: f64 = 0.1;

/// Relative slack when comparing a ratio with a threshold, so that a
/// parameter set placed exactly on a threshold is classified by its
/// nominal value rather than by the last bit of a unit conversion.
const THRESHOLD_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FlagStatus {
    Satisfied,
    Marginal,
    Violated,
}

impl fmt::Display for FlagStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlagStatus::Satisfied => "satisfied",
            FlagStatus::Marginal => "marginal",
            FlagStatus::Violated => "violated",
        })
    }
}

/// One inequality `small ≪ large`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeFlag {
    pub name: String,
    pub small: f64,
    pub large: f64,
    pub ratio: f64,
    pub status: FlagStatus,
}

impl RegimeFlag {
    pub fn much_less(name: impl Into<String>, small: f64, large: f64) -> Self {
        Self::with_threshold(name, small, large, MUCH_LESS_THRESHOLD)
    }

    pub fn with_threshold(name: impl Into<String>, small: f64, large: f64, threshold: f64) -> Self {
        let small = small.abs();
        let large = large.abs();
        let ratio = if large > 0.0 {
            small / large
        } else if small == 0.0 {
            f64::NAN
        } else {
            f64::INFINITY
        };
        let status = if ratio.is_nan() {
            FlagStatus::Violated
        } else if ratio <= threshold * (1.0 + THRESHOLD_SLACK) {
            FlagStatus::Satisfied
        } else if ratio < 1.0 - THRESHOLD_SLACK {
            FlagStatus::Marginal
        } else {
            FlagStatus::Violated
        };
        Self { name: name.into(), small, large, ratio, status }
    }
}

/// Constants left unspecified by the coupling-strength bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConstants {
    /// Prefactor `C` of the bounds on `|V|`.
    pub c: f64,
    /// Rate `c` in the strong-coupling suppression `γ̃ ~ e^{-cξ²}`.
    pub decay: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self { c: 1.0, decay: 1.0 }
    }
}

/// Upper bounds on `|V|` from the three coupling constraints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingConstraints {
    /// `ξ = |λ₁ - λ₂|` (collective) or `max |λ_j|` (local).
    pub xi: f64,
    /// `θ = min{|ε̂|, γ̃}`.
    pub theta: f64,
    pub gamma_tilde: f64,
    /// `C/(1 + ξ²)`.
    pub born: f64,
    /// `C min{γ̃/(1 + ξ⁶), √γ̃ ξ^{-5}}`.
    pub separation: f64,
    /// `C min{θ, √θ/(1 + ξ⁶)}`.
    pub no_backreaction: f64,
    /// Minimum of the three.
    pub v0_bound: f64,
    /// `C e^{-cξ²}`, the expected size of `γ̃` for `ξ ≫ 1`.
    pub strong_coupling_scale: f64,
}

impl CouplingConstraints {
    pub fn admits(&self, v: f64) -> bool {
        v.abs() <= self.v0_bound
    }
}

/// Time window in which the main term of the population expansion dominates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsefulnessWindow {
    /// `C/p(0)`.
    pub t_min: f64,
    /// `1/γ`; infinite when `γ = 0`.
    pub t_max: f64,
    /// `C/p∞` if `p(0) >= p∞`, else `C/q∞`; present when `p∞` is known.
    pub t_min_equilibrium: Option<f64>,
    pub degenerate: bool,
}

/// Collected diagnostics for one parameter point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegimeReport {
    pub flags: Vec<RegimeFlag>,
    /// `|λ₁ - λ₂|` (collective) or `[|λ₁|, |λ₂|]` (local).
    pub xi: Vec<f64>,
    pub theta: Option<f64>,
    pub v0_bound: Option<f64>,
    pub usefulness_window: Option<UsefulnessWindow>,
}

impl RegimeReport {
    pub fn overall(&self) -> FlagStatus {
        self.flags.iter().map(|f| f.status).max().unwrap_or(FlagStatus::Satisfied)
    }

    pub fn flag(&self, name: &str) -> Option<&RegimeFlag> {
        self.flags.iter().find(|f| f.name == name)
    }

    pub fn merge(mut self, other: RegimeReport) -> Self {
        self.flags.extend(other.flags);
        if self.xi.is_empty() {
            self.xi = other.xi;
        }
        self.theta = self.theta.or(other.theta);
        self.v0_bound = self.v0_bound.or(other.v0_bound);
        self.usefulness_window = self.usefulness_window.or(other.usefulness_window);
        self
    }
}

fn xi_of(dimer: &DimerParams, model: &SpectralModel) -> Vec<f64> {
    if model.is_collective() {
        vec![(dimer.lambda1 - dimer.lambda2).abs()]
    } else {
        vec![dimer.lambda1.abs(), dimer.lambda2.abs()]
    }
}

/// High-temperature conditions under which the generalized Marcus formula
/// applies: `ω_c ≪ T` and `ω_c² ≪ T(ε₁ + ε₂)` (collective), or per-site
/// `ω_{j,c} ≪ T`, `ω_{j,c}² ≪ λ_j² T ν_j` (local).
pub fn check_marcus_regime(dimer: &DimerParams, model: &SpectralModel, scalars: &DerivedScalars) -> RegimeReport {
    let t = dimer.temperature();
    let mut flags = Vec::new();
    match model {
        SpectralModel::Collective(d) => {
            let sum = scalars.eps_rec_collective.map_or(0.0, |[a, b]| a + b);
            flags.push(RegimeFlag::much_less("omega_c << T", d.omega_c, t));
            flags.push(RegimeFlag::much_less("omega_c^2 << T (eps_c1 + eps_c2)", d.omega_c.powi(2), t * sum));
        }
        SpectralModel::Local(d1, d2) => {
            let lam = [dimer.lambda1, dimer.lambda2];
            for (j, d) in [d1, d2].into_iter().enumerate() {
                let site = j + 1;
                flags.push(RegimeFlag::much_less(format!("omega_c{site} << T"), d.omega_c, t));
                flags.push(RegimeFlag::much_less(
                    format!("omega_c{site}^2 << lambda{site}^2 T nu{site}"),
                    d.omega_c.powi(2),
                    lam[j].powi(2) * t * scalars.nu[j],
                ));
            }
        }
    }
    RegimeReport { flags, xi: xi_of(dimer, model), ..Default::default() }
}

/// Conditions for the high-temperature partial-decoherence rate:
/// `ω_c ≪ T`, `(λ₁ - λ₂)²ν ≪ ω_c²/T` and `|ε̂| ≪ ω_c` (collective), with the
/// per-site analogues for local baths.
pub fn check_high_temp_partial_regime(
    dimer: &DimerParams,
    model: &SpectralModel,
    scalars: &DerivedScalars,
) -> RegimeReport {
    let t = dimer.temperature();
    let mut flags = Vec::new();
    match model {
        SpectralModel::Collective(d) => {
            flags.push(RegimeFlag::much_less("omega_c << T", d.omega_c, t));
            flags.push(RegimeFlag::much_less(
                "(lambda1 - lambda2)^2 nu << omega_c^2 / T",
                (dimer.lambda1 - dimer.lambda2).powi(2) * scalars.nu[0],
                d.omega_c.powi(2) / t,
            ));
            flags.push(RegimeFlag::much_less("|eps_hat| << omega_c", scalars.epsilon_hat, d.omega_c));
        }
        SpectralModel::Local(d1, d2) => {
            let lam = [dimer.lambda1, dimer.lambda2];
            for (j, d) in [d1, d2].into_iter().enumerate() {
                let site = j + 1;
                flags.push(RegimeFlag::much_less(format!("omega_c{site} << T"), d.omega_c, t));
                flags.push(RegimeFlag::much_less(
                    format!("lambda{site}^2 nu{site} << omega_c{site}^2 / T"),
                    lam[j].powi(2) * scalars.nu[j],
                    d.omega_c.powi(2) / t,
                ));
            }
            let wc = d1.omega_c.min(d2.omega_c);
            flags.push(RegimeFlag::much_less("|eps_hat| << omega_c", scalars.epsilon_hat, wc));
        }
    }
    RegimeReport { flags, xi: xi_of(dimer, model), ..Default::default() }
}

/// Upper bound `V₀` on `|V|` for the perturbative expansion, given the
/// reduced rate `γ̃ = γ/V²`.
pub fn coupling_constraints(
    dimer: &DimerParams,
    model: &SpectralModel,
    scalars: &DerivedScalars,
    gamma_tilde: f64,
    constants: BoundConstants,
) -> Result<CouplingConstraints> {
    if !(gamma_tilde >= 0.0 && gamma_tilde.is_finite()) {
        return Err(Error::InvalidParameter(format!("reduced rate must be finite and >= 0, got {gamma_tilde}")));
    }
    let xi = xi_of(dimer, model).into_iter().fold(0.0, f64::max);
    let c = constants.c;
    let theta = scalars.epsilon_hat.abs().min(gamma_tilde);
    let xi6 = 1.0 + xi.powi(6);
    let born = c / (1.0 + xi * xi);
    let separation = c * (gamma_tilde / xi6).min(gamma_tilde.sqrt() * xi.powi(-5));
    let no_backreaction = c * theta.min(theta.sqrt() / xi6);
    Ok(CouplingConstraints {
        xi,
        theta,
        gamma_tilde,
        born,
        separation,
        no_backreaction,
        v0_bound: born.min(separation).min(no_backreaction),
        strong_coupling_scale: c * (-constants.decay * xi * xi).exp(),
    })
}

/// Window `C/p(0) ≪ t ≪ 1/γ` in which the remainder of the population
/// expansion is small compared with the main term.
pub fn usefulness_window(p0: f64, gamma: f64, c_const: f64, p_inf: Option<f64>) -> Result<UsefulnessWindow> {
    if !(p0 > 0.0 && p0 <= 1.0) {
        return Err(Error::InvalidParameter(format!("initial population must lie in (0, 1], got {p0}")));
    }
    if !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be >= 0, got {gamma}")));
    }
    let t_min = c_const / p0;
    let t_max = if gamma > 0.0 { 1.0 / gamma } else { f64::INFINITY };
    let t_min_equilibrium = p_inf.map(|pi| if p0 >= pi { c_const / pi } else { c_const / (1.0 - pi) });
    Ok(UsefulnessWindow { t_min, t_max, t_min_equilibrium, degenerate: t_min >= t_max })
}
