//! Monte-Carlo check of the `V = 0` dephasing law.
//!
//! A classical stationary Gaussian noise `ξ_t` with two-point function
//! `C(t) = (1/π) ∫₀^∞ J(ω) coth(βω/2) cos(ωt) dω` produces the average phase
//! factor `⟨exp(-2iλ∫₀^t ξ_s ds)⟩ = exp(-(4λ²/π) Q₂(t))`, the modulus of the
//! quantum coherence factor for `λ₁ = -λ₂ = λ` on a collective bath.
//!
//! Paths are synthesized spectrally,
//! `ξ_t = Σ_k σ_k (a_k cos ω_k t + b_k sin ω_k t)` with `σ_k² = S(ω_k) w_k`
//! on a logarithmic frequency grid, so the time integral of each path is
//! exact. Path `n` draws its amplitudes from a ChaCha stream selected by `n`,
//! which makes the ensemble independent of the thread schedule.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::spectral::SpectralDensity;

pub const DEFAULT_FREQUENCY_NODES: usize = 2048;
pub const MIN_PATHS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSimConfig {
    pub n_paths: usize,
    /// Step of the output grid in `τ = t/β`.
    pub dt: f64,
    /// Last grid time in `τ`.
    pub t_max: f64,
    pub seed: u64,
    pub lambda: f64,
    pub density: SpectralDensity,
    pub beta: f64,
    pub frequency_nodes: usize,
    /// Frequency window as multiples of `ω_c`.
    pub omega_min_factor: f64,
    pub omega_max_factor: f64,
}

impl NoiseSimConfig {
    pub fn new(density: SpectralDensity, beta: f64, lambda: f64, n_paths: usize, dt: f64, t_max: f64, seed: u64) -> Self {
        Self {
            n_paths,
            dt,
            t_max,
            seed,
            lambda,
            density,
            beta,
            frequency_nodes: DEFAULT_FREQUENCY_NODES,
            omega_min_factor: 1e-4,
            omega_max_factor: 50.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.density.validate()?;
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {}", self.beta)));
        }
        if self.n_paths < MIN_PATHS {
            return Err(Error::InvalidParameter(format!(
                "n_paths must be at least {MIN_PATHS}, got {}",
                self.n_paths
            )));
        }
        let eta = self.density.eta(self.beta);
        let dt_max = 0.1 * 1.0f64.min(1.0 / eta);
        if !(self.dt > 0.0) || self.dt > dt_max * (1.0 + 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "dt = {} does not resolve the correlation time (need 0 < dt <= {dt_max})",
                self.dt
            )));
        }
        if !(self.t_max >= 0.0) || !self.t_max.is_finite() {
            return Err(Error::InvalidParameter(format!("t_max must be finite and >= 0, got {}", self.t_max)));
        }
        if !self.lambda.is_finite() {
            return Err(Error::InvalidParameter("lambda must be finite".into()));
        }
        if self.frequency_nodes < 2 {
            return Err(Error::InvalidParameter("at least two frequency nodes are required".into()));
        }
        if !(self.omega_min_factor > 0.0 && self.omega_max_factor > self.omega_min_factor) {
            return Err(Error::InvalidParameter(format!(
                "frequency window [{}, {}] x omega_c is empty",
                self.omega_min_factor, self.omega_max_factor
            )));
        }
        Ok(())
    }

    /// Output grid in `τ`.
    pub fn grid(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(|k| k as f64 * self.dt).collect()
    }
}

/// Discretized noise spectrum and the integration tables for one grid.
#[derive(Debug, Clone)]
pub struct NoiseSynthesizer {
    omega: Vec<f64>,
    sigma: Vec<f64>,
    times: Vec<f64>,
    /// `sin(ω_k t_j)/ω_k`, row-major in `j`.
    sin_table: Vec<f64>,
    /// `(1 - cos ω_k t_j)/ω_k`.
    cos_table: Vec<f64>,
}

fn coth_half(x: f64) -> f64 {
    // coth(x/2) = 1 + 2/(e^x - 1)
    1.0 + 2.0 / x.exp_m1()
}

impl NoiseSynthesizer {
    /// Spectrum of `cfg` on the physical times `βτ` of its grid.
    pub fn new(cfg: &NoiseSimConfig) -> Result<Self> {
        cfg.validate()?;
        let wc = cfg.density.omega_c;
        let (lo, hi) = ((cfg.omega_min_factor * wc).ln(), (cfg.omega_max_factor * wc).ln());
        let n = cfg.frequency_nodes;
        let du = (hi - lo) / (n - 1) as f64;
        let mut omega = Vec::with_capacity(n);
        let mut sigma = Vec::with_capacity(n);
        for k in 0..n {
            let w = (lo + k as f64 * du).exp();
            let edge = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
            let s = cfg.density.eval(w)? * coth_half(cfg.beta * w) / PI;
            let var = s * w * du * edge;
            if !var.is_finite() || var < 0.0 {
                return Err(Error::Domain(format!("noise spectrum is not finite at omega = {w}")));
            }
            omega.push(w);
            sigma.push(var.sqrt());
        }
        let times: Vec<f64> = cfg.grid().iter().map(|tau| cfg.beta * tau).collect();
        let mut sin_table = Vec::with_capacity(times.len() * n);
        let mut cos_table = Vec::with_capacity(times.len() * n);
        for &t in &times {
            for &w in &omega {
                sin_table.push((w * t).sin() / w);
                cos_table.push(2.0 * (0.5 * w * t).sin().powi(2) / w);
            }
        }
        Ok(Self { omega, sigma, times, sin_table, cos_table })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.omega
    }

    /// Physical times of the grid.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Covariance of the synthesized process at a physical lag.
    pub fn covariance(&self, lag: f64) -> f64 {
        let terms: Vec<f64> = self.omega.iter().zip(&self.sigma).map(|(w, s)| s * s * (w * lag).cos()).collect();
        pairwise_sum(&terms)
    }

    /// Variance of `∫₀^t ξ_s ds` implied by the synthesized spectrum.
    pub fn phase_variance(&self, t: f64) -> f64 {
        let terms: Vec<f64> = self
            .omega
            .iter()
            .zip(&self.sigma)
            .map(|(w, s)| {
                let h = (0.5 * w * t).sin() / w;
                4.0 * s * s * h * h
            })
            .collect();
        pairwise_sum(&terms)
    }

    fn amplitudes(&self, seed: u64, path: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path);
        let n = self.omega.len();
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for s in &self.sigma {
            let x: f64 = StandardNormal.sample(&mut rng);
            let y: f64 = StandardNormal.sample(&mut rng);
            a.push(s * x);
            b.push(s * y);
        }
        (a, b)
    }

    /// `ξ` of one path at the physical times `ts`.
    pub fn path_noise(&self, seed: u64, path: u64, ts: &[f64]) -> Vec<f64> {
        let (a, b) = self.amplitudes(seed, path);
        ts.iter()
            .map(|&t| {
                let terms: Vec<f64> = self
                    .omega
                    .iter()
                    .zip(a.iter().zip(&b))
                    .map(|(w, (a, b))| {
                        let (s, c) = (w * t).sin_cos();
                        a * c + b * s
                    })
                    .collect();
                pairwise_sum(&terms)
            })
            .collect()
    }

    /// `∫₀^t ξ_s ds` of one path on the grid.
    pub fn path_phase(&self, seed: u64, path: u64) -> Vec<f64> {
        let (a, b) = self.amplitudes(seed, path);
        let n = self.omega.len();
        (0..self.times.len())
            .map(|j| {
                let row = j * n..(j + 1) * n;
                let st = &self.sin_table[row.clone()];
                let ct = &self.cos_table[row];
                let mut acc = 0.0;
                for k in 0..n {
                    acc += a[k] * st[k] + b[k] * ct[k];
                }
                acc
            })
            .collect()
    }
}

/// Ensemble estimate of `⟨exp(-2iλ∫ξ)⟩` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingEstimate {
    /// Grid in `τ`.
    pub tau: Vec<f64>,
    pub mean: Vec<Complex64>,
    pub std_err_re: Vec<f64>,
    pub std_err_im: Vec<f64>,
    pub n_paths: usize,
}

pub fn simulate_dephasing(cfg: &NoiseSimConfig) -> Result<DephasingEstimate> {
    let synth = NoiseSynthesizer::new(cfg)?;
    let tau = cfg.grid();
    let nt = tau.len();
    if cfg.lambda == 0.0 {
        return Ok(DephasingEstimate {
            tau,
            mean: vec![Complex64::new(1.0, 0.0); nt],
            std_err_re: vec![0.0; nt],
            std_err_im: vec![0.0; nt],
            n_paths: cfg.n_paths,
        });
    }
    let k = -2.0 * cfg.lambda;
    let samples: Vec<Vec<(f64, f64)>> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|path| {
            synth
                .path_phase(cfg.seed, path)
                .into_iter()
                .map(|phi| {
                    let (s, c) = (k * phi).sin_cos();
                    (c, s)
                })
                .collect()
        })
        .collect();

    let n = cfg.n_paths as f64;
    let mut mean = Vec::with_capacity(nt);
    let mut se_re = Vec::with_capacity(nt);
    let mut se_im = Vec::with_capacity(nt);
    let mut col = Vec::with_capacity(cfg.n_paths);
    for j in 0..nt {
        let mut stats = [0.0; 2];
        let mut errs = [0.0; 2];
        for (c, slot) in [0usize, 1].into_iter().zip(stats.iter_mut().zip(errs.iter_mut())) {
            col.clear();
            col.extend(samples.iter().map(|row| if c == 0 { row[j].0 } else { row[j].1 }));
            let m = pairwise_sum(&col) / n;
            let dev: Vec<f64> = col.iter().map(|x| (x - m) * (x - m)).collect();
            let var = pairwise_sum(&dev) / (n - 1.0);
            *slot.0 = m;
            *slot.1 = (var / n).sqrt();
        }
        mean.push(Complex64::new(stats[0], stats[1]));
        se_re.push(errs[0]);
        se_im.push(errs[1]);
    }
    Ok(DephasingEstimate { tau, mean, std_err_re: se_re, std_err_im: se_im, n_paths: cfg.n_paths })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{KernelMethod, KernelSet};
    use approx::assert_relative_eq;

    fn cfg(n_paths: usize) -> NoiseSimConfig {
        let d = SpectralDensity::new(0.5, 1.0, 1.0).unwrap();
        NoiseSimConfig::new(d, 1.0, 0.5, n_paths, 0.1, 2.0, 7)
    }

    #[test]
    fn validation() {
        assert!(cfg(99).validate().is_err());
        let mut c = cfg(100);
        c.dt = 0.2;
        assert!(c.validate().is_err());
        assert!(cfg(100).validate().is_ok());
    }

    #[test]
    fn zero_coupling_is_exactly_one() {
        let mut c = cfg(100);
        c.lambda = 0.0;
        let e = simulate_dephasing(&c).unwrap();
        assert!(e.mean.iter().all(|z| *z == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn synthesized_phase_variance_matches_kernel() {
        let c = cfg(100);
        let s = NoiseSynthesizer::new(&c).unwrap();
        let k = KernelSet::new(c.density, 1.0, KernelMethod::ClosedForm).unwrap();
        for t in [0.5, 1.0, 2.0] {
            // Var ∫ξ = α_C = (2/π) Q₂
            assert_relative_eq!(s.phase_variance(t), 2.0 / PI * k.q2_physical(t).unwrap(), max_relative = 1e-3);
        }
    }

    #[test]
    fn paths_do_not_depend_on_order() {
        let c = cfg(100);
        let s = NoiseSynthesizer::new(&c).unwrap();
        let p3 = s.path_phase(c.seed, 3);
        let _ = s.path_phase(c.seed, 1);
        assert_eq!(p3, s.path_phase(c.seed, 3));
        assert_ne!(p3, s.path_phase(c.seed, 4));
        assert_eq!(simulate_dephasing(&c).unwrap(), simulate_dephasing(&c).unwrap());
    }
}
