//! Special functions used by the closed-form bath kernels.
//!
//! The Hurwitz zeta function is evaluated by shifting the second argument
//! upward with the defining recurrence until `|q| >= 10` and then applying
//! Euler–Maclaurin summation with Bernoulli corrections. The same expansion
//! is the analytic continuation of the series for `s < 1`, which the kernels
//! need for sub-ohmic baths (`-1/2 < p < 0`), so it is exposed separately as
//! [`hurwitz_zeta_continued`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `B_{2k} / (2k)!` for `k = 1..=10`.
const BERNOULLI_OVER_FACTORIAL: [f64; 10] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
    -174_611.0 / 330.0 / 2_432_902_008_176_640_000.0,
];

/// `B_{2k}` for `k = 1..=10`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43_867.0 / 798.0,
    -174_611.0 / 330.0,
];

const SHIFT_RADIUS: f64 = 10.0;

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Hurwitz zeta `ζ(s, q) = Σ_{n≥0} (n + q)^{-s}` for real `s > 1` and `Re q > 0`.
pub fn hurwitz_zeta(s: f64, q: Complex64) -> Result<Complex64> {
    if !(s > 1.0) {
        return Err(Error::Domain(format!("hurwitz_zeta requires s > 1, got {s}")));
    }
    hurwitz_zeta_continued(s, q)
}

/// Analytic continuation of the Hurwitz zeta function in `s` for any real
/// `s != 1` and `Re q > 0`.
///
/// For `s > 1` this coincides with [`hurwitz_zeta`].
pub fn hurwitz_zeta_continued(s: f64, q: Complex64) -> Result<Complex64> {
    if !s.is_finite() || s == 1.0 {
        return Err(Error::Domain(format!(
            "hurwitz zeta has a pole at s = 1 (got s = {s})"
        )));
    }
    if !(q.re > 0.0) || !q.im.is_finite() {
        return Err(Error::Domain(format!(
            "hurwitz zeta requires Re(q) > 0, got q = {q}"
        )));
    }

    let mut sum = Complex64::new(0.0, 0.0);
    let mut w = q;
    while w.norm() < SHIFT_RADIUS {
        sum += w.powf(-s);
        w += 1.0;
    }

    let ln_w = w.ln();
    let w_pow = (-s * ln_w).exp(); // w^{-s}
    sum += w_pow * w / (s - 1.0);
    sum += 0.5 * w_pow;

    // k-th correction: B_{2k}/(2k)! * s(s+1)...(s+2k-2) * w^{-s-2k+1}
    let inv_w2 = (w * w).inv();
    let mut rising = s;
    let mut power = w_pow / w;
    for (k, coef) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = power * (coef * rising);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
        let m = 2.0 * k as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power *= inv_w2;
    }
    Ok(sum)
}

/// Riemann zeta `ζ(s) = ζ(s, 1)` for `s > 1`.
pub fn riemann_zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, Complex64::new(1.0, 0.0)).map(|z| z.re)
}

/// Digamma `ψ(q)` for `Re q > 0`.
pub fn digamma(q: Complex64) -> Result<Complex64> {
    if !(q.re > 0.0) || !q.im.is_finite() {
        return Err(Error::Domain(format!("digamma requires Re(q) > 0, got q = {q}")));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = q;
    while w.norm() < SHIFT_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv_w2 = (w * w).inv();
    let mut series = w.ln() - 0.5 * w.inv();
    let mut power = inv_w2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let term = power * (b / (2.0 * (k + 1) as f64));
        series -= term;
        if term.norm() <= 1e-18 * series.norm() {
            break;
        }
        power *= inv_w2;
    }
    Ok(series - shift)
}

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
