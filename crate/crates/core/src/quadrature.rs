//! Adaptive Gauss–Kronrod quadrature on finite and semi-infinite intervals.
//!
//! Every improper integral in the analysis (`∫_h^∞`, `∫_r^∞`, `∫_0^∞`) goes
//! through [`integrate_semi_infinite_scaled`], which maps `[a, ∞)` onto
//! `[0, 1)` with `x = a + L·t/(1-t)` and then runs the same globally adaptive
//! 21-point Kronrod scheme used for finite intervals. The scale `L` should be
//! the length over which the integrand does most of its work; a poor choice
//! costs subdivisions, not accuracy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of intervals the adaptive scheme may hold.
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::param("rel_tol", "must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::param("abs_tol", "must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::param("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }

    /// Spec for an inner integral of a nested evaluation: ten times tighter
    /// relative tolerance so the outer error budget is not consumed by the
    /// inner one.
    pub fn inner(&self) -> Self {
        Self {
            rel_tol: (self.rel_tol / 10.0).max(1e-14),
            abs_tol: self.abs_tol / 10.0,
            ..*self
        }
    }
}

// Kronrod abscissae (positive half) and weights for the 21-point rule,
// with the embedded 10-point Gauss weights on the odd-indexed nodes.
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
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

fn kronrod21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut kronrod_abs = kronrod.abs();
    let mut gauss = 0.0;
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        kronrod_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = kronrod_abs * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let round_floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(round_floor);
    }
    Segment { a, b, value, error }
}

/// Globally adaptive integration of `f` over the finite interval `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!(
            "finite integration bounds required, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, spec).map(|v| -v);
    }

    let first = kronrod21(&f, a, b);
    let mut total = first.value;
    let mut total_err = first.error;
    if !total.is_finite() {
        return Err(Error::Numeric(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mut heap = BinaryHeap::with_capacity(64);
    heap.push(first);

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        if heap.len() >= spec.max_subdivisions {
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: total_err,
                subdivisions: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at floating-point resolution; nothing left to refine.
            return Err(Error::Quadrature {
                estimate: total,
                error_bound: total_err,
                subdivisions: heap.len() + 1,
            });
        }
        let left = kronrod21(&f, worst.a, mid);
        let right = kronrod21(&f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        if !total.is_finite() {
            return Err(Error::Numeric(format!(
                "integrand is not finite near [{}, {}]",
                worst.a, worst.b
            )));
        }
        heap.push(left);
        heap.push(right);
        // Running sums drift; resynchronise now and then.
        if heap.len() % 64 == 0 {
            total = heap.iter().map(|s| s.value).sum();
            total_err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// `∫_lower^∞ f(x) dx` with unit transformation scale.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_semi_infinite_scaled(f, lower, 1.0, spec)
}

/// `∫_lower^∞ f(x) dx` using `x = lower + scale·t/(1-t)`, `t ∈ [0, 1)`.
pub fn integrate_semi_infinite_scaled<F: Fn(f64) -> f64>(
    f: F,
    lower: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if !lower.is_finite() {
        return Err(Error::Domain(format!("lower bound must be finite, got {lower}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::param("scale", format!("must be finite and > 0, got {scale}")));
    }
    let mapped = |t: f64| {
        let one_minus = 1.0 - t;
        let x = lower + scale * t / one_minus;
        if !x.is_finite() {
            return 0.0;
        }
        let jac = scale / (one_minus * one_minus);
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * jac
        }
    };
    integrate(mapped, 0.0, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exponential_tail_integrates_to_one() {
        let v = integrate_semi_infinite(|x| (-x).exp(), 0.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn inverse_square_tail() {
        let v = integrate_semi_infinite(|x| x.powi(-2), 1.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn finite_polynomial_is_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-12);
        let r = integrate(|x| 3.0 * x * x, 2.0, 0.0, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r, -8.0, epsilon = 1e-12);
    }

    #[test]
    fn scaled_map_handles_wide_support() {
        // Gaussian tail centred far from the lower bound.
        let spec = QuadratureSpec::default();
        let f = |x: f64| (-(x - 500.0).powi(2) / 200.0).exp();
        let v = integrate_semi_infinite_scaled(f, 0.0, 300.0, &spec).unwrap();
        assert_abs_diff_eq!(v, (200.0 * std::f64::consts::PI).sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn integrable_endpoint_singularity() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn exhausted_budget_reports_estimate() {
        let spec = QuadratureSpec {
            rel_tol: 1e-14,
            abs_tol: 1e-300,
            max_subdivisions: 3,
        };
        let err = integrate(|x| (1.0 / x).sin(), 1e-3, 1.0, &spec).unwrap_err();
        match err {
            Error::Quadrature {
                estimate,
                error_bound,
                ..
            } => {
                assert!(estimate.is_finite());
                assert!(error_bound > 0.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(QuadratureSpec::new(0.0, 1e-12, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, -1.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-8, 1e-12, 0).is_err());
    }
}
