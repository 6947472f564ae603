//! Bath correlation kernels.
//!
//! In dimensionless time `τ = t/β`, with `η = βω_c` and `s = 2p + 1`,
//!
//! ```text
//! 𝒬₁(τ) = 1/(η Γ(s+1)) ∫₀^∞ z^{2p} e^{-z} sin(ητz) dz
//! 𝒬₂(τ) = 1/(η Γ(s+1)) ∫₀^∞ z^{2p} e^{-z} (1 - cos ητz) coth(ηz/2) dz
//! ```
//!
//! with closed forms `𝒬₁ = Im[(1 - iητ)^{-s}]/(sη)` and
//! `𝒬₂ = Re[f(0) - f(τ)]/(sη)`, `f(τ) = η^{-s}[ζ(s, 1/η + iτ) + ζ(s, 1/η + 1 + iτ)]`.
//! The physical kernels are `Q_{1,2}(t) = βν 𝒬_{1,2}(t/β)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Tolerance};
use crate::specfun::{digamma, gamma, hurwitz_zeta_continued};
use crate::spectral::{SpectralDensity, SpectralModel};

/// How kernel values are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelMethod {
    ClosedForm,
    Quadrature,
}

/// Default upper bound on memoized entries per kernel set.
pub const DEFAULT_CACHE_CAPACITY: usize = 1 << 18;

/// Evaluator for the kernels of a single reservoir.
///
/// Values are memoized by the exact bit pattern of `τ`. The table only ever
/// stores the deterministic value for a key, so concurrent use gives results
/// that do not depend on thread interleaving.
#[derive(Debug)]
pub struct KernelSet {
    density: SpectralDensity,
    beta: f64,
    method: KernelMethod,
    eta: f64,
    s: f64,
    /// `1/(sη)`
    norm: f64,
    /// `f(0)`; for `p = 0` the finite part built from digamma values.
    f0: f64,
    cache: Option<RwLock<HashMap<u64, (f64, f64)>>>,
    cache_capacity: usize,
}

impl KernelSet {
    pub fn new(density: SpectralDensity, beta: f64, method: KernelMethod) -> Result<Self> {
        density.validate()?;
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        let eta = density.eta(beta);
        let s = 2.0 * density.p + 1.0;
        let mut ks = Self {
            density,
            beta,
            method,
            eta,
            s,
            norm: 1.0 / (s * eta),
            f0: 0.0,
            cache: Some(RwLock::new(HashMap::new())),
            cache_capacity: DEFAULT_CACHE_CAPACITY,
        };
        ks.f0 = ks.f_closed(0.0)?.re;
        Ok(ks)
    }

    /// Kernel set on dimensionless parameters alone (`β = 1`, `ω_c = η`, `ν = 1`).
    pub fn dimensionless(p: f64, eta: f64, method: KernelMethod) -> Result<Self> {
        Self::new(SpectralDensity::with_nu(p, eta, 1.0)?, 1.0, method)
    }

    /// Disable memoization.
    pub fn without_cache(mut self) -> Self {
        self.cache = None;
        self
    }

    pub fn with_cache_capacity(mut self, capacity: usize) -> Self {
        self.cache_capacity = capacity;
        self
    }

    pub fn density(&self) -> &SpectralDensity {
        &self.density
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn method(&self) -> KernelMethod {
        self.method
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn p(&self) -> f64 {
        self.density.p
    }

    pub fn cached_len(&self) -> usize {
        self.cache.as_ref().map_or(0, |c| c.read().map(|m| m.len()).unwrap_or(0))
    }

    /// `(𝒬₁(τ), 𝒬₂(τ))`.
    pub fn eval(&self, tau: f64) -> Result<(f64, f64)> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("kernels need a finite tau >= 0, got {tau}")));
        }
        if tau == 0.0 {
            return Ok((0.0, 0.0));
        }
        let key = tau.to_bits();
        if let Some(cache) = &self.cache {
            if let Some(v) = cache.read().ok().and_then(|m| m.get(&key).copied()) {
                return Ok(v);
            }
        }
        let v = match self.method {
            KernelMethod::ClosedForm => (self.q1_closed(tau), self.q2_closed(tau)?),
            KernelMethod::Quadrature => (self.q1_quadrature(tau)?, self.q2_quadrature(tau)?),
        };
        if let Some(cache) = &self.cache {
            if let Ok(mut m) = cache.write() {
                if m.len() < self.cache_capacity {
                    m.insert(key, v);
                }
            }
        }
        Ok(v)
    }

    pub fn q1(&self, tau: f64) -> Result<f64> {
        self.eval(tau).map(|v| v.0)
    }

    pub fn q2(&self, tau: f64) -> Result<f64> {
        self.eval(tau).map(|v| v.1)
    }

    /// Saturation value `𝒬₀ = lim 𝒬₂(τ)`, finite only for `p > 0`.
    pub fn q0(&self) -> Result<f64> {
        if self.density.p <= 0.0 {
            return Err(Error::Divergent(format!(
                "Q2 grows without bound for p = {} <= 0",
                self.density.p
            )));
        }
        match self.method {
            KernelMethod::ClosedForm => Ok(self.norm * self.f0),
            KernelMethod::Quadrature => self.q0_quadrature(),
        }
    }

    /// `𝒬₀ - 𝒬₂(τ)` for `p > 0`, without cancellation in the closed form.
    pub fn q2_deficit(&self, tau: f64) -> Result<f64> {
        let q0 = self.q0()?;
        match self.method {
            KernelMethod::ClosedForm if tau > 0.0 => Ok(self.norm * self.f_closed(tau)?.re),
            _ => Ok(q0 - self.q2(tau)?),
        }
    }

    /// Smallest `τ` with `𝒬₀ - 𝒬₂(τ) <= tol·𝒬₀`, located by doubling and
    /// bisection.
    pub fn saturation_time(&self, tol: f64) -> Result<f64> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(Error::InvalidParameter(format!("tolerance must lie in (0, 1), got {tol}")));
        }
        let q0 = self.q0()?;
        let target = tol * q0;
        let saturated = |tau: f64| -> Result<bool> { Ok(self.q2_deficit(tau)? <= target) };
        let mut hi = 1.0f64.min(1.0 / self.eta);
        let mut lo = 0.0;
        while !saturated(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::NonConvergence(format!(
                    "Q2 does not reach {tol} of its saturation value before tau = 1e15"
                )));
            }
        }
        while hi - lo > 1e-10 * hi {
            let mid = 0.5 * (lo + hi);
            if saturated(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Physical `Q₁(t) = βν 𝒬₁(t/β)`.
    pub fn q1_physical(&self, t: f64) -> Result<f64> {
        Ok(self.beta * self.density.nu() * self.q1(t / self.beta)?)
    }

    /// Physical `Q₂(t) = βν 𝒬₂(t/β)`.
    pub fn q2_physical(&self, t: f64) -> Result<f64> {
        Ok(self.beta * self.density.nu() * self.q2(t / self.beta)?)
    }

    fn q1_closed(&self, tau: f64) -> f64 {
        // (1 - iητ)^{-s} = r^{-s} e^{i s θ}, θ = atan(ητ)
        let x = self.eta * tau;
        let theta = x.atan();
        let r = x.hypot(1.0);
        self.norm * r.powf(-self.s) * (self.s * theta).sin()
    }

    fn q2_closed(&self, tau: f64) -> Result<f64> {
        Ok(self.norm * (self.f0 - self.f_closed(tau)?.re))
    }

    /// `f(τ)`; for `p = 0` the τ-dependent part `-η^{-1}[ψ(a+iτ) + ψ(a+1+iτ)]`,
    /// which differs from `f` by a τ-independent (infinite) constant.
    fn f_closed(&self, tau: f64) -> Result<Complex64> {
        let q = Complex64::new(1.0 / self.eta, tau);
        if self.density.p == 0.0 {
            let psi = digamma(q)?;
            return Ok(-(2.0 * psi + q.inv()) / self.eta);
        }
        // ζ(s, q + 1) = ζ(s, q) - q^{-s}
        let z = hurwitz_zeta_continued(self.s, q)?;
        Ok((2.0 * z - q.powf(-self.s)) * self.eta.powf(-self.s))
    }

    fn quad_prefactor(&self) -> f64 {
        1.0 / (self.eta * gamma(self.s + 1.0))
    }

    fn z_max(&self) -> f64 {
        60.0 + 10.0 * self.density.p.max(0.0)
    }

    fn q1_quadrature(&self, tau: f64) -> Result<f64> {
        let w = self.eta * tau;
        let osc = |z: f64| (w * z).sin();
        Ok(self.quad_prefactor() * self.weighted_integral(&osc, w)?)
    }

    fn q2_quadrature(&self, tau: f64) -> Result<f64> {
        let w = self.eta * tau;
        let eta = self.eta;
        let osc = |z: f64| {
            let h = (0.5 * w * z).sin();
            2.0 * h * h * coth_half(eta * z)
        };
        Ok(self.quad_prefactor() * self.weighted_integral(&osc, w)?)
    }

    fn q0_quadrature(&self) -> Result<f64> {
        let eta = self.eta;
        let osc = |z: f64| coth_half(eta * z);
        Ok(self.quad_prefactor() * self.weighted_integral(&osc, 0.0)?)
    }

    /// `∫₀^∞ z^{2p} e^{-z} g(z) dz` for an oscillation frequency `w` of `g`.
    fn weighted_integral<G: Fn(f64) -> f64>(&self, g: &G, w: f64) -> Result<f64> {
        let p = self.density.p;
        let panel = if w > 0.0 { (PI / w).min(1.0) } else { 1.0 };
        let z_max = self.z_max();
        let tol = Tolerance::new(1e-15, 1e-12);

        let mut parts = Vec::new();
        let first_end = panel.min(z_max);
        if p < 0.0 {
            // z = u^{1/s} absorbs the z^{2p} singularity: z^{2p} dz = du/s
            let s = self.s;
            let inner = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let z = u.powf(1.0 / s);
                (-z).exp() * g(z) / s
            };
            parts.push(quad::integrate(&inner, 0.0, first_end.powf(s), tol)?.value);
        } else {
            let f = |z: f64| weight(z, p) * g(z);
            parts.push(quad::integrate(&f, 0.0, first_end, tol)?.value);
        }
        let n = ((z_max - first_end) / panel).ceil().max(0.0) as usize;
        let edges: Vec<f64> = (0..=n)
            .map(|k| (first_end + k as f64 * panel).min(z_max))
            .collect();
        let f = |z: f64| weight(z, p) * g(z);
        parts.push(quad::integrate_panels(&f, &edges, tol)?.value);
        Ok(quad::pairwise_sum(&parts))
    }

    /// Approximation of `(𝒬₁, 𝒬₂)` from the named asymptotic regime.
    pub fn q_asymptotic(&self, tau: f64, regime: AsymptoticRegime) -> Result<AsymptoticEstimate> {
        let eta = self.eta;
        let p = self.density.p;
        let s = self.s;
        let x = eta * tau;
        let mut conditions = Vec::new();
        let much_less = |name: &str, small: f64, large: f64, out: &mut Vec<RegimeCondition>| {
            out.push(RegimeCondition::new(name, small, large));
        };
        let short_q1 = tau;
        let long_q1 = || {
            tau * (PI * p).cos() / (s * x.powf(s + 1.0)) + tau * (PI * p).sin() / x.powf(s + 2.0)
        };
        let decay = |power: f64| (1.0 - Complex64::new(1.0, x).powf(-power)).re;
        let (q1, q2) = match regime {
            AsymptoticRegime::SmallEtaShortTime => {
                much_less("eta << 1", eta, 1.0, &mut conditions);
                much_less("eta*tau << 1", x, 1.0, &mut conditions);
                (Some(short_q1), tau * tau)
            }
            AsymptoticRegime::ShortTime => {
                much_less("eta*tau << 1", x, 1.0, &mut conditions);
                let z = hurwitz_zeta_continued(2.0 * p + 3.0, Complex64::new(1.0 / eta, 0.0))?.re;
                let q2 = (p + 1.0) * (2.0 * z - eta.powf(2.0 * p + 3.0)) * tau * tau / eta.powf(2.0 * p + 2.0);
                (Some(short_q1), q2)
            }
            AsymptoticRegime::LargeEtaLongTime => {
                much_less("1 << eta", 1.0, eta, &mut conditions);
                much_less("1 << eta*tau", 1.0, x, &mut conditions);
                if p <= 0.0 {
                    conditions.push(RegimeCondition::failed("p > 0"));
                }
                (Some(long_q1()), decay(s) / (s * eta))
            }
            AsymptoticRegime::SubOhmicLongTime => {
                much_less("1 << eta*tau", 1.0, x, &mut conditions);
                if !(p < 0.0) {
                    conditions.push(RegimeCondition::failed("-1/2 < p < 0"));
                }
                (Some(long_q1()), decay(2.0 * p) / (s * p * eta * eta))
            }
            AsymptoticRegime::SmallEta => {
                // Same expression as the sub-Ohmic long-time row; listed separately
                // because it is quoted for all p > -1/2 at small η.
                much_less("eta << 1", eta, 1.0, &mut conditions);
                if p == 0.0 {
                    conditions.push(RegimeCondition::failed("p != 0"));
                }
                (None, decay(2.0 * p) / (s * p * eta * eta))
            }
        };
        Ok(AsymptoticEstimate { q1, q2, conditions })
    }

    /// Approximation of `𝒬₀` in the small- or large-`η` limit (`p > 0`).
    pub fn q0_asymptotic(&self, large_eta: bool) -> Result<f64> {
        let p = self.density.p;
        if p <= 0.0 {
            return Err(Error::Divergent(format!("Q0 is infinite for p = {p} <= 0")));
        }
        let eta = self.eta;
        let s = self.s;
        if large_eta {
            let z1 = crate::specfun::riemann_zeta(s)?;
            let z2 = crate::specfun::riemann_zeta(s + 1.0)?;
            Ok(1.0 / (s * eta) + 2.0 * z1 / (s * eta.powf(s + 1.0)) - 2.0 * z2 / eta.powf(s + 2.0))
        } else {
            Ok(1.0 / (s * p * eta * eta))
        }
    }
}

/// `z^{2p} e^{-z}`.
fn weight(z: f64, p: f64) -> f64 {
    if z <= 0.0 {
        return 0.0;
    }
    z.powf(2.0 * p) * (-z).exp()
}

/// `coth(x/2) = 1 + 2/(e^x - 1)`, with the Laurent series for tiny `x`.
fn coth_half(x: f64) -> f64 {
    if x < 1e-4 {
        2.0 / x + x / 6.0
    } else {
        1.0 + 2.0 / x.exp_m1()
    }
}

/// Asymptotic regimes of the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymptoticRegime {
    /// `η ≪ 1`, `ητ ≪ 1`: `𝒬₁ ≈ τ`, `𝒬₂ ≈ τ²`.
    SmallEtaShortTime,
    /// `ητ ≪ 1`: quadratic onset with the zeta-function prefactor.
    ShortTime,
    /// `η ≫ 1`, `ητ ≫ 1`, `p > 0`.
    LargeEtaLongTime,
    /// `ητ ≫ 1`, `-1/2 < p < 0`.
    SubOhmicLongTime,
    /// `η ≪ 1`, any `τ > 0`.
    SmallEta,
}

/// One "≪" or sign condition of an asymptotic regime.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeCondition {
    pub name: String,
    pub small: f64,
    pub large: f64,
    pub holds: bool,
}

impl RegimeCondition {
    fn new(name: &str, small: f64, large: f64) -> Self {
        Self { name: name.into(), small, large, holds: small <= 0.1 * large }
    }

    fn failed(name: &str) -> Self {
        Self { name: name.into(), small: f64::NAN, large: f64::NAN, holds: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticEstimate {
    /// `None` where the regime gives no formula for `𝒬₁`.
    pub q1: Option<f64>,
    pub q2: f64,
    pub conditions: Vec<RegimeCondition>,
}

impl AsymptoticEstimate {
    /// Conditions that fail; the estimate is then only indicative.
    pub fn warnings(&self) -> Vec<String> {
        self.conditions
            .iter()
            .filter(|c| !c.holds)
            .map(|c| format!("asymptotic regime condition not met: {}", c.name))
            .collect()
    }
}

/// Kernel sets for both sites of a dimer; a collective bath (or two identical
/// local baths) share one set.
#[derive(Debug, Clone)]
pub struct ModelKernels {
    sites: [Arc<KernelSet>; 2],
    collective: bool,
}

impl ModelKernels {
    pub fn new(model: &SpectralModel, beta: f64, method: KernelMethod) -> Result<Self> {
        match model {
            SpectralModel::Collective(d) => {
                let ks = Arc::new(KernelSet::new(*d, beta, method)?);
                Ok(Self { sites: [ks.clone(), ks], collective: true })
            }
            SpectralModel::Local(d1, d2) => {
                let k1 = Arc::new(KernelSet::new(*d1, beta, method)?);
                let k2 = if d1 == d2 { k1.clone() } else { Arc::new(KernelSet::new(*d2, beta, method)?) };
                Ok(Self { sites: [k1, k2], collective: false })
            }
        }
    }

    pub fn from_sets(sites: [Arc<KernelSet>; 2], collective: bool) -> Self {
        Self { sites, collective }
    }

    pub fn site(&self, j: usize) -> &Arc<KernelSet> {
        &self.sites[j]
    }

    pub fn is_collective(&self) -> bool {
        self.collective
    }

    pub fn beta(&self) -> f64 {
        self.sites[0].beta
    }

    pub fn shares_sets(&self) -> bool {
        Arc::ptr_eq(&self.sites[0], &self.sites[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ks(p: f64, eta: f64, m: KernelMethod) -> KernelSet {
        KernelSet::dimensionless(p, eta, m).unwrap()
    }

    #[test]
    fn zero_at_origin() {
        for m in [KernelMethod::ClosedForm, KernelMethod::Quadrature] {
            assert_eq!(ks(0.5, 1.0, m).eval(0.0).unwrap(), (0.0, 0.0));
        }
    }

    #[test]
    fn q0_small_eta() {
        let k = ks(0.5, 0.1, KernelMethod::ClosedForm);
        let q0 = k.q0().unwrap();
        assert!((q0 - 100.1663).abs() < 1e-3, "q0 = {q0}");
        assert_relative_eq!(k.q0_asymptotic(false).unwrap(), 100.0, max_relative = 1e-12);
    }

    #[test]
    fn q0_quadrature_matches_closed_form() {
        for (p, eta) in [(0.5, 0.1), (1.5, 1.0), (0.25, 5.0)] {
            let a = ks(p, eta, KernelMethod::ClosedForm).q0().unwrap();
            let b = ks(p, eta, KernelMethod::Quadrature).q0().unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn q0_diverges_for_nonpositive_p() {
        assert!(matches!(ks(-0.25, 1.0, KernelMethod::ClosedForm).q0(), Err(Error::Divergent(_))));
        assert!(matches!(ks(0.0, 1.0, KernelMethod::ClosedForm).q0(), Err(Error::Divergent(_))));
        assert!(ks(-0.25, 1.0, KernelMethod::ClosedForm).saturation_time(0.01).is_err());
    }

    #[test]
    fn ohmic_digamma_branch_matches_quadrature() {
        let a = ks(0.0, 0.7, KernelMethod::ClosedForm);
        let b = ks(0.0, 0.7, KernelMethod::Quadrature);
        for tau in [0.3, 2.0, 11.0] {
            assert_relative_eq!(a.q2(tau).unwrap(), b.q2(tau).unwrap(), max_relative = 1e-8);
            assert_relative_eq!(a.q1(tau).unwrap(), b.q1(tau).unwrap(), max_relative = 1e-8);
        }
    }

    #[test]
    fn saturation_time_examples() {
        let k = ks(0.5, 0.1, KernelMethod::ClosedForm);
        let t1 = k.saturation_time(0.01).unwrap();
        assert!(t1 > 10.0 && t1 < 1000.0, "t* = {t1}");
        let t2 = k.saturation_time(0.5).unwrap();
        assert!(t2 < t1);
        let q0 = k.q0().unwrap();
        assert!(q0 - k.q2(t1).unwrap() <= 0.01 * q0 * (1.0 + 1e-9));
        assert!(ks(1.5, 1.0, KernelMethod::ClosedForm).saturation_time(1e-4).unwrap().is_finite());
    }

    #[test]
    fn short_time_asymptotes() {
        let k = ks(0.5, 0.1, KernelMethod::ClosedForm);
        let tau = 0.2;
        let est = k.q_asymptotic(tau, AsymptoticRegime::SmallEtaShortTime).unwrap();
        assert!(est.warnings().is_empty());
        assert_relative_eq!(est.q1.unwrap(), k.q1(tau).unwrap(), max_relative = 1e-3);
        assert_relative_eq!(est.q2, k.q2(tau).unwrap(), max_relative = 0.05);
        let est = ks(1.5, 3.0, KernelMethod::ClosedForm).q_asymptotic(0.002, AsymptoticRegime::ShortTime).unwrap();
        let exact = ks(1.5, 3.0, KernelMethod::ClosedForm).q2(0.002).unwrap();
        assert_relative_eq!(est.q2, exact, max_relative = 1e-3);
    }

    #[test]
    fn long_time_asymptotes() {
        let k = ks(0.5, 20.0, KernelMethod::ClosedForm);
        let est = k.q_asymptotic(50.0, AsymptoticRegime::LargeEtaLongTime).unwrap();
        assert!(est.warnings().is_empty());
        assert_relative_eq!(est.q2, k.q2(50.0).unwrap(), max_relative = 0.05);
        assert_relative_eq!(est.q1.unwrap(), k.q1(50.0).unwrap(), max_relative = 1e-3);
        let k = ks(-0.25, 1.0, KernelMethod::ClosedForm);
        let est = k.q_asymptotic(1e4, AsymptoticRegime::SubOhmicLongTime).unwrap();
        assert_relative_eq!(est.q2, k.q2(1e4).unwrap(), max_relative = 0.05);
        let mismatch = k.q_asymptotic(1e4, AsymptoticRegime::LargeEtaLongTime).unwrap();
        assert!(!mismatch.warnings().is_empty());
    }

    #[test]
    fn physical_scaling() {
        let d = SpectralDensity::new(0.5, 3.0, 0.2).unwrap();
        let k = KernelSet::new(d, 0.4, KernelMethod::ClosedForm).unwrap();
        let t = 1.7;
        // Q1 = ∫ J/ω² sin(ωt) dω, evaluated directly
        let direct = quad::integrate(
            &|w: f64| d.eval(w).unwrap() / (w * w) * (w * t).sin(),
            1e-300,
            200.0,
            Tolerance::new(1e-14, 1e-12),
        )
        .unwrap()
        .value;
        assert_relative_eq!(k.q1_physical(t).unwrap(), direct, max_relative = 1e-9);
    }

    #[test]
    fn cache_is_transparent() {
        let k = ks(0.5, 1.0, KernelMethod::ClosedForm);
        let a = k.eval(2.5).unwrap();
        assert_eq!(k.cached_len(), 1);
        assert_eq!(k.eval(2.5).unwrap(), a);
        let fresh = ks(0.5, 1.0, KernelMethod::ClosedForm).without_cache();
        assert_eq!(fresh.eval(2.5).unwrap(), a);
        assert_eq!(fresh.cached_len(), 0);
    }

    #[test]
    fn identical_local_baths_share_a_set() {
        let d = SpectralDensity::new(0.5, 1.0, 1.0).unwrap();
        let m = ModelKernels::new(&SpectralModel::Local(d, d), 1.0, KernelMethod::ClosedForm).unwrap();
        assert!(m.shares_sets());
        assert!(!m.is_collective());
    }
}
