//! Relaxation rates, Lamb shift and their approximations.
//!
//! The exact rate is the Abel-regularized integral
//!
//! ```text
//! γ = βV² lim_{r→0+} ∫₀^∞ e^{-rτ} cos(aτ) cos Φ(τ) e^{-Γ(τ)} dτ,   a = βε̂,
//! ```
//!
//! evaluated as a head integral over `[0, T]` plus an analytic tail. Beyond
//! `T` the amplitude `h(τ) = cos Φ e^{-Γ} - C`, with `C = e^{-Γ∞}`, is smooth
//! and slowly varying, so `C cos(aτ)` contributes its Abel value
//! `-C sin(aT)/a` and the remainder `h cos(aτ)` is summed by repeated
//! integration by parts.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::coupling::CouplingProfile;
use crate::error::{Error, Result};
use crate::kernels::ModelKernels;
use crate::quad::{self, Tolerance};
use crate::regimes::{check_high_temp_partial_regime, RegimeReport};
use crate::spectral::{DerivedScalars, DimerParams, SpectralModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RateMethod {
    ExactIntegral,
    GeneralizedMarcus,
    /// Single-exponential Marcus formula.
    StandardMarcus,
    /// Two-exponential symmetric Marcus formula.
    StandardMarcusSymmetric,
    HighTempPartial,
    LevelShiftTrace,
}

impl fmt::Display for RateMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RateMethod::ExactIntegral => "exact_integral",
            RateMethod::GeneralizedMarcus => "generalized_marcus",
            RateMethod::StandardMarcus => "standard_marcus",
            RateMethod::StandardMarcusSymmetric => "standard_marcus_symmetric",
            RateMethod::HighTempPartial => "high_temp_partial",
            RateMethod::LevelShiftTrace => "level_shift_trace",
        })
    }
}

/// A rate in ps⁻¹ (or in the energy unit of the inputs) with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub gamma: f64,
    /// Lamb shift `x_LS`, when computed alongside the rate.
    pub lamb_shift: Option<f64>,
    pub method: RateMethod,
    /// Part of `gamma` contributed by the analytic tail beyond the horizon.
    pub tail_contribution: f64,
    /// Estimated error of the analytic tail, in the units of `gamma`.
    pub tail_error: f64,
    /// Integration horizon in dimensionless time (0 for closed forms).
    pub horizon: f64,
    pub diagnostics: Vec<String>,
    pub regime: Option<RegimeReport>,
}

impl RateReport {
    fn closed_form(gamma: f64, method: RateMethod) -> Self {
        Self {
            gamma,
            lamb_shift: None,
            method,
            tail_contribution: 0.0,
            tail_error: 0.0,
            horizon: 0.0,
            diagnostics: Vec::new(),
            regime: None,
        }
    }

    /// `βγ`.
    pub fn dimensionless(&self, beta: f64) -> f64 {
        beta * self.gamma
    }

    pub fn is_divergent(&self) -> bool {
        self.diagnostics.iter().any(|d| d.starts_with(DIVERGENT_PREFIX))
    }
}

const DIVERGENT_PREFIX: &str = "divergent";

/// Envelope level below which the integrand counts as decayed.
const ENVELOPE_TOL: f64 = 1e-15;
/// Saturation tolerance defining the default horizon for `p > 0`.
const SATURATION_TOL: f64 = 1e-4;
/// Largest horizon explored when the integrand must decay on its own.
const MAX_DECAY_HORIZON: f64 = 1e7;
const HEAD_TOL: Tolerance = Tolerance::new(1e-13, 1e-11);
/// Target for the estimated error of the analytic tail.
const TAIL_TOL: f64 = 1e-12;
/// Largest factor by which the tail may push the horizon out.
const MAX_TAIL_EXTENSION: f64 = 4096.0;

/// Tolerances of the rate-integral engine, by name.
pub fn engine_tolerances() -> Vec<(&'static str, f64)> {
    vec![
        ("envelope", ENVELOPE_TOL),
        ("saturation", SATURATION_TOL),
        ("max_decay_horizon", MAX_DECAY_HORIZON),
        ("head_abs", HEAD_TOL.abs),
        ("head_rel", HEAD_TOL.rel),
        ("tail", TAIL_TOL),
        ("max_tail_extension", MAX_TAIL_EXTENSION),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trig {
    Cos,
    Sin,
}

impl Trig {
    fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }
}

/// Integration horizon and limit value of the amplitude.
#[derive(Debug, Clone, Copy)]
struct Horizon {
    t: f64,
    /// `C = e^{-Γ∞}` (0 when `Γ∞` diverges).
    c: f64,
    divergent: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct AbelParts {
    head: f64,
    tail: f64,
    tail_error: f64,
    horizon: f64,
}

impl AbelParts {
    fn value(&self) -> f64 {
        self.head + self.tail
    }
}

fn envelope(profile: &CouplingProfile, c: f64, tau: f64) -> Result<f64> {
    let v = profile.values(tau)?;
    let e = (-v.damping).exp();
    Ok(e * ((v.rate_phase.cos() - 1.0).abs() + v.rate_phase.sin().abs()) + (e - c).abs())
}

/// Envelope below tolerance at `τ` and at an incommensurate later point, so
/// that isolated zeros of the phase are not mistaken for decay.
fn decayed(profile: &CouplingProfile, c: f64, tau: f64) -> Result<bool> {
    Ok(envelope(profile, c, tau)? <= ENVELOPE_TOL && envelope(profile, c, 1.37 * tau)? <= ENVELOPE_TOL)
}

fn choose_horizon(profile: &CouplingProfile, a: f64) -> Result<Horizon> {
    let c = profile.gamma_infinity()?.map_or(0.0, |g| (-g).exp());
    let inv_eta = if profile.is_uncoupled() { 0.0 } else { 1.0 / profile.min_eta() };

    let mut t_sat = 0.0f64;
    if c > 0.0 {
        for ch in profile.channels.iter().filter(|ch| ch.damping != 0.0) {
            let cap = 1e3 * ch.kernels.eta().recip().max(1.0);
            let ts = match ch.kernels.saturation_time(SATURATION_TOL) {
                Ok(ts) => ts.min(cap),
                Err(Error::NonConvergence(_)) => cap,
                Err(e) => return Err(e),
            };
            t_sat = t_sat.max(ts);
        }
    }
    let mut t_max = t_sat.max(50.0 * inv_eta).max(50.0);
    if a != 0.0 {
        t_max = t_max.max(200.0 / a.abs());
    }

    let mut t = 1.0;
    while t < t_max {
        if decayed(profile, c, t)? {
            return Ok(Horizon { t, c, divergent: false });
        }
        t *= 2.0;
    }
    if a != 0.0 {
        return Ok(Horizon { t: t_max, c, divergent: false });
    }
    if c > 0.0 {
        return Ok(Horizon { t: t_max, c, divergent: true });
    }
    // zero frequency, decaying amplitude: the integral must converge absolutely
    while t <= MAX_DECAY_HORIZON {
        if decayed(profile, c, t)? {
            return Ok(Horizon { t, c, divergent: false });
        }
        t *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "integrand does not decay below {ENVELOPE_TOL:e} before tau = {MAX_DECAY_HORIZON:e} at zero bias"
    )))
}

/// `Abel ∫_T^∞ trig(aτ) amp(τ) dτ` for `a ≠ 0` with its error estimate.
fn analytic_tail<F>(a: f64, trig: Trig, amp: &F, limit: f64, t: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    // constant part: Abel ∫_T^∞ cos = -sin(aT)/a, ∫_T^∞ sin = cos(aT)/a
    let constant = match trig {
        Trig::Cos => -limit * (a * t).sin() / a,
        Trig::Sin => limit * (a * t).cos() / a,
    };

    // ∫_T^∞ h e^{iaτ} ≈ -e^{iaT} [h/(ia) - h'/(ia)² + h''/(ia)³ - h'''/(ia)⁴];
    // the first omitted term h''''/a⁵ estimates the error
    let h = |tau: f64| amp(tau).map(|v| v - limit);
    let d = t / 50.0;
    let (hm2, hm1, h0, hp1, hp2) = (h(t - 2.0 * d)?, h(t - d)?, h(t)?, h(t + d)?, h(t + 2.0 * d)?);
    let h1 = (-hp2 + 8.0 * hp1 - 8.0 * hm1 + hm2) / (12.0 * d);
    let h2 = (-hp2 + 16.0 * hp1 - 30.0 * h0 + 16.0 * hm1 - hm2) / (12.0 * d * d);
    let h3 = (hp2 - 2.0 * hp1 + 2.0 * hm1 - hm2) / (2.0 * d * d * d);
    let h4 = (hp2 - 4.0 * hp1 + 6.0 * h0 - 4.0 * hm1 + hm2) / (d * d * d * d);
    let ia = Complex64::new(0.0, a);
    let ia2 = ia * ia;
    let series = h0 / ia - h1 / ia2 + h2 / (ia2 * ia) - h3 / (ia2 * ia2);
    let z = -Complex64::from_polar(1.0, a * t) * series;
    let remainder = match trig {
        Trig::Cos => z.re,
        Trig::Sin => z.im,
    };
    Ok((constant + remainder, (h4 / a.powi(5)).abs()))
}

/// `Abel ∫₀^∞ trig(aτ) amp(τ) dτ` with `amp → limit` as `τ → ∞`.
///
/// The horizon is pushed out until the estimated tail error drops below
/// [`TAIL_TOL`].
fn abel_integral<F>(a: f64, trig: Trig, amp: &F, limit: f64, horizon: &Horizon) -> Result<AbelParts>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut t = horizon.t;
    let (mut tail, mut tail_error) = (0.0, 0.0);
    if a != 0.0 {
        let cap = (t * MAX_TAIL_EXTENSION).min(MAX_DECAY_HORIZON).max(t);
        loop {
            (tail, tail_error) = analytic_tail(a, trig, amp, limit, t)?;
            if tail_error <= TAIL_TOL || 2.0 * t > cap {
                break;
            }
            t *= 2.0;
        }
    }

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let integrand = |tau: f64| match amp(tau) {
        Ok(v) => trig.eval(a * tau) * v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            f64::NAN
        }
    };
    let panel = if a != 0.0 { (PI / a.abs()).min(2.0) } else { 2.0 };
    let n = (t / panel).ceil().max(1.0) as usize;
    let edges: Vec<f64> = (0..=n).map(|k| if k == n { t } else { k as f64 * panel }).collect();
    let head = quad::integrate_panels(&integrand, &edges, HEAD_TOL);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(AbelParts { head: head?.value, tail, tail_error, horizon: t })
}

/// `cos Φ(τ) e^{-Γ(τ)}`.
fn rate_amplitude(profile: &CouplingProfile) -> impl Fn(f64) -> Result<f64> + '_ {
    move |tau| {
        let v = profile.values(tau)?;
        Ok(v.rate_phase.cos() * (-v.damping).exp())
    }
}

/// `sin Φ(τ) e^{-Γ(τ)}`.
fn quadrature_amplitude(profile: &CouplingProfile) -> impl Fn(f64) -> Result<f64> + '_ {
    move |tau| {
        let v = profile.values(tau)?;
        Ok(v.rate_phase.sin() * (-v.damping).exp())
    }
}

fn divergence_note(a: f64) -> String {
    format!(
        "{DIVERGENT_PREFIX}: zero effective bias (a = {a}) with a saturating coherence factor; \
         value is the head integral only"
    )
}

/// Dimensionless rate integral `γ/(βV²)` with its parts.
fn rate_integral(profile: &CouplingProfile) -> Result<(AbelParts, bool)> {
    let a = profile.eps_eff;
    let hz = choose_horizon(profile, a)?;
    let parts = abel_integral(a, Trig::Cos, &rate_amplitude(profile), hz.c, &hz)?;
    Ok((parts, hz.divergent))
}

/// Dimensionless Lamb-shift integral `2 x_LS/(βV²)`.
fn lamb_integral(profile: &CouplingProfile) -> Result<AbelParts> {
    let a = profile.eps_eff;
    if a == 0.0 {
        return Ok(AbelParts::default());
    }
    let hz = choose_horizon(profile, a)?;
    abel_integral(a, Trig::Sin, &rate_amplitude(profile), hz.c, &hz)
}

fn exact_report(
    dimer: &DimerParams,
    profile: &CouplingProfile,
    parts: AbelParts,
    divergent: bool,
    method: RateMethod,
    scale: f64,
) -> RateReport {
    let k = dimer.v * dimer.v * dimer.beta * scale;
    let mut diagnostics = Vec::new();
    if divergent {
        diagnostics.push(divergence_note(profile.eps_eff));
    }
    RateReport {
        gamma: k * parts.value(),
        lamb_shift: None,
        method,
        tail_contribution: k * parts.tail,
        tail_error: k * parts.tail_error,
        horizon: parts.horizon,
        diagnostics,
        regime: None,
    }
}

/// Exact relaxation rate from the regularized time integral.
pub fn gamma_exact(dimer: &DimerParams, model: &SpectralModel, kernels: &ModelKernels) -> Result<RateReport> {
    let profile = CouplingProfile::new(dimer, model, kernels)?;
    gamma_exact_profile(dimer, &profile)
}

pub fn gamma_exact_profile(dimer: &DimerParams, profile: &CouplingProfile) -> Result<RateReport> {
    let (parts, divergent) = rate_integral(profile)?;
    Ok(exact_report(dimer, profile, parts, divergent, RateMethod::ExactIntegral, 1.0))
}

/// Lamb shift `x_LS` (energy units).
pub fn lamb_shift(dimer: &DimerParams, model: &SpectralModel, kernels: &ModelKernels) -> Result<f64> {
    let profile = CouplingProfile::new(dimer, model, kernels)?;
    lamb_shift_profile(dimer, &profile)
}

pub fn lamb_shift_profile(dimer: &DimerParams, profile: &CouplingProfile) -> Result<f64> {
    let parts = lamb_integral(profile)?;
    Ok(0.5 * dimer.v * dimer.v * dimer.beta * parts.value())
}

/// Exact rate with the Lamb shift filled in.
pub fn rate_with_lamb_shift(dimer: &DimerParams, model: &SpectralModel, kernels: &ModelKernels) -> Result<RateReport> {
    let profile = CouplingProfile::new(dimer, model, kernels)?;
    let mut report = gamma_exact_profile(dimer, &profile)?;
    report.lamb_shift = Some(lamb_shift_profile(dimer, &profile)?);
    Ok(report)
}

/// Level-shift function `x(a) = ½ Abel ∫₀^∞ cos(aτ - Φ(τ)) e^{-Γ(τ)} dτ`
/// (dimensionless; multiply by `β` for time units), evaluated at bias `a`
/// with the channels of `profile`.
pub fn level_shift_function(profile: &CouplingProfile, a: f64) -> Result<f64> {
    let shifted = profile.with_eps_eff(a);
    let hz = choose_horizon(&shifted, a)?;
    if hz.divergent {
        return Err(Error::Divergent(divergence_note(a)));
    }
    let cos_part = abel_integral(a, Trig::Cos, &rate_amplitude(&shifted), hz.c, &hz)?;
    let sin_part = abel_integral(a, Trig::Sin, &quadrature_amplitude(&shifted), 0.0, &hz)?;
    Ok(0.5 * (cos_part.value() + sin_part.value()))
}

/// Detailed-balance check of the level-shift function:
/// returns `(x(a), x(-a), x(-a) - e^{-a} x(a))`.
pub fn detailed_balance(profile: &CouplingProfile) -> Result<(f64, f64, f64)> {
    let a = profile.eps_eff;
    let fwd = level_shift_function(profile, a)?;
    let bwd = level_shift_function(profile, -a)?;
    Ok((fwd, bwd, bwd - (-a).exp() * fwd))
}

/// Rate from the trace of the level-shift operator,
/// `γ = V²(1 + e^{-βε̂}) x(ε̂)`; equal to [`gamma_exact`] by detailed balance.
pub fn gamma_from_level_shift(dimer: &DimerParams, model: &SpectralModel, kernels: &ModelKernels) -> Result<RateReport> {
    let profile = CouplingProfile::new(dimer, model, kernels)?;
    let a = profile.eps_eff;
    let x = level_shift_function(&profile, a)?;
    let gamma = dimer.v * dimer.v * dimer.beta * (1.0 + (-a).exp()) * x;
    let mut r = RateReport::closed_form(gamma, RateMethod::LevelShiftTrace);
    r.horizon = choose_horizon(&profile, a)?.t;
    Ok(r)
}

/// Generalized Marcus rate
/// `(V/2)² √(2π/(T Σ)) {exp[-(ε - ε₁)²/(2TΣ)] + exp[-(ε + ε₂)²/(2TΣ)]}`
/// with `Σ = ε₁ + ε₂` the reorganization energies of the model's topology.
pub fn gamma_marcus_generalized(dimer: &DimerParams, scalars: &DerivedScalars) -> Result<RateReport> {
    let [e1, e2] = scalars.eps_rec();
    let sum = e1 + e2;
    if !(sum > 0.0) {
        return Err(Error::Domain(format!(
            "generalized Marcus rate needs a positive total reorganization energy, got {sum}"
        )));
    }
    let t = dimer.temperature();
    let width = 2.0 * t * sum;
    let eps = dimer.epsilon;
    let half_v = 0.5 * dimer.v;
    let gamma = half_v * half_v
        * (2.0 * PI / (t * sum)).sqrt()
        * ((-(eps - e1).powi(2) / width).exp() + (-(eps + e2).powi(2) / width).exp());
    Ok(RateReport::closed_form(gamma, RateMethod::GeneralizedMarcus))
}

/// Classic and symmetric two-term Marcus rates for one reorganization energy.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardMarcus {
    /// `(V/2)² √(π/(Tε_r)) e^{-(ε - ε_r)²/(4Tε_r)}`
    pub classic: RateReport,
    /// Classic term plus `(V/2)² √(π/(Tε_r)) e^{-(ε + ε_r)²/(4Tε_r)}`.
    pub symmetric: RateReport,
}

pub fn gamma_marcus_standard(dimer: &DimerParams, eps_rec: f64) -> Result<StandardMarcus> {
    if !(eps_rec > 0.0) {
        return Err(Error::Domain(format!("Marcus rate needs a positive reorganization energy, got {eps_rec}")));
    }
    let t = dimer.temperature();
    let half_v = 0.5 * dimer.v;
    let pre = half_v * half_v * (PI / (t * eps_rec)).sqrt();
    let width = 4.0 * t * eps_rec;
    let first = pre * (-(dimer.epsilon - eps_rec).powi(2) / width).exp();
    let second = pre * (-(dimer.epsilon + eps_rec).powi(2) / width).exp();
    Ok(StandardMarcus {
        classic: RateReport::closed_form(first, RateMethod::StandardMarcus),
        symmetric: RateReport::closed_form(first + second, RateMethod::StandardMarcusSymmetric),
    })
}

/// Upper bound `2√(2π)(V/2)²/ω_c` on the generalized Marcus rate inside its
/// regime of validity.
pub fn marcus_upper_bound(v: f64, omega_c: f64) -> f64 {
    let half_v = 0.5 * v;
    2.0 * (2.0 * PI).sqrt() * half_v * half_v / omega_c
}

/// High-temperature rate for partial decoherence,
/// `V²/ω_c (1 - exp[-(2T/π) Σ_j B_j κ_j])`, with `κ = (λ₁ - λ₂)²` on a
/// collective bath and `κ_j = λ_j²` on local baths.
///
/// For local baths with different cutoffs the prefactor uses their geometric
/// mean. Regime conditions are attached, never enforced.
pub fn gamma_high_temp_partial(
    dimer: &DimerParams,
    model: &SpectralModel,
    scalars: &DerivedScalars,
) -> Result<RateReport> {
    let need_b = |j: usize| {
        scalars.b_coef[j].ok_or_else(|| {
            Error::Domain(format!(
                "high-temperature partial-decoherence rate needs p > 0 (site {} has p = {})",
                j + 1,
                model.site(j).p
            ))
        })
    };
    let t = dimer.temperature();
    let (exponent, omega_c) = match model {
        SpectralModel::Collective(d) => {
            let b = need_b(0)?;
            (2.0 * t * b / PI * (dimer.lambda1 - dimer.lambda2).powi(2), d.omega_c)
        }
        SpectralModel::Local(d1, d2) => {
            let mut s = 0.0;
            for (j, lam) in [dimer.lambda1, dimer.lambda2].into_iter().enumerate() {
                if lam != 0.0 {
                    s += need_b(j)? * lam * lam;
                }
            }
            (2.0 * t / PI * s, (d1.omega_c * d2.omega_c).sqrt())
        }
    };
    let gamma = dimer.v * dimer.v / omega_c * -(-exponent).exp_m1();
    let mut r = RateReport::closed_form(gamma, RateMethod::HighTempPartial);
    let regime = check_high_temp_partial_regime(dimer, model, scalars);
    for f in regime.flags.iter().filter(|f| f.status != crate::regimes::FlagStatus::Satisfied) {
        r.diagnostics.push(format!("regime condition {} is {} (ratio {:.3e})", f.name, f.status, f.ratio));
    }
    r.regime = Some(regime);
    Ok(r)
}
