//! Adaptive Gauss–Kronrod quadrature.
//!
//! A 21-point Kronrod rule with its embedded 10-point Gauss rule, applied
//! globally adaptively: the segment with the largest error estimate is
//! bisected until the total estimate meets the requested tolerance.
//! Oscillatory integrands are handled by the callers, which split the range
//! into panels no longer than half an oscillation period.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_685_815_903,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, max_segments: 2000 }
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(1e-12, 1e-12)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    floor: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// One application of the 21-point Kronrod rule on `[a, b]`.
///
/// Returns the Kronrod estimate and a QUADPACK-style error estimate.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let (value, error, _) = kronrod(f, a, b);
    (value, error)
}

/// [`gk21`] plus the roundoff floor `50ε∫|f|` of the error estimate.
fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (result, err, floor)
}

/// Globally adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Result<QuadResult> {
    if a == b {
        return Ok(QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 });
    }
    let (value, error, floor) = kronrod(f, a, b);
    let mut evaluations = 21;
    let mut total = value;
    let mut total_err = error;
    if !value.is_finite() {
        return Err(Error::NonConvergence(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error, floor });

    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_segments {
            return Err(Error::NonConvergence(format!(
                "adaptive quadrature on [{a}, {b}] stalled at error {total_err:e} (value {total:e})"
            )));
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b || seg.error <= seg.floor {
            // interval exhausted at machine resolution, or the worst
            // segment is already at its roundoff floor
            heap.push(seg);
            break;
        }
        let (v1, e1, r1) = kronrod(f, seg.a, mid);
        let (v2, e2, r2) = kronrod(f, mid, seg.b);
        evaluations += 42;
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1, floor: r1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2, floor: r2 });
        if !total.is_finite() {
            return Err(Error::NonConvergence(format!(
                "integrand is not finite on [{a}, {b}]"
            )));
        }
    }

    // Re-sum from the segments to shed accumulated update roundoff.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = pairwise_sum(&segments.iter().map(|s| s.value).collect::<Vec<_>>());
    let abs_error = segments.iter().map(|s| s.error).sum();
    Ok(QuadResult { value, abs_error, evaluations })
}

/// Integrate over consecutive panels `[edges[i], edges[i+1]]`, each adaptively.
pub fn integrate_panels<F: Fn(f64) -> f64>(f: &F, edges: &[f64], tol: Tolerance) -> Result<QuadResult> {
    let mut values = Vec::with_capacity(edges.len().saturating_sub(1));
    let mut abs_error = 0.0;
    let mut evaluations = 0;
    for w in edges.windows(2) {
        let r = integrate(f, w[0], w[1], tol)?;
        values.push(r.value);
        abs_error += r.abs_error;
        evaluations += r.evaluations;
    }
    Ok(QuadResult { value: pairwise_sum(&values), abs_error, evaluations })
}

/// Pairwise (cascade) summation; result is independent of evaluation order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let (v, _) = gk21(&|x: f64| x.powi(7) - 3.0 * x * x, 0.0, 2.0);
        assert_relative_eq!(v, 32.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_sqrt_singularity() {
        let r = integrate(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::new(1e-10, 1e-10)).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn panels_of_oscillation() {
        let edges: Vec<f64> = (0..=40).map(|k| k as f64 * PI / 10.0).collect();
        let r = integrate_panels(&|x: f64| (10.0 * x).sin() * (-x).exp(), &edges, Tolerance::default()).unwrap();
        // ∫_0^{4π} e^{-x} sin(10x) dx = 10 (1 - e^{-4π}) / 101
        let exact = 10.0 * (1.0 - (-4.0 * PI).exp()) / 101.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-12);
    }

    #[test]
    fn non_convergence_is_reported() {
        let tol = Tolerance { abs: 1e-14, rel: 0.0, max_segments: 4 };
        let r = integrate(&|x: f64| (1.0 / x).sin(), 1e-6, 1.0, tol);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(pairwise_sum(&xs), 10.0);
    }
}
