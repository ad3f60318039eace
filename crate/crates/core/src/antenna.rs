//! Sectorized uniform-planar-array gain and the gain law of interfering
//! mmWave UAVs.
//!
//! An interfering UAV steers its main lobe at its own user. Seen from the
//! typical user at slant distance `d`, the UAV's gain is `G_M` with
//! probability `p_M = p_θ · p_φ(d)` and `G_S` otherwise, where
//! `p_θ = Δθ/2π` and `p_φ(d)` is the chance that the elevation of the
//! steered beam lands within `Δφ/2` of the elevation toward the typical
//! user. [`ElevationModel`] selects how `p_φ` is evaluated.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::geometry::{Point2, ServingDistanceDist};

/// Sectorized gain description of an `N`-element square UPA with
/// half-wavelength spacing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpaPattern {
    pub n_antennas: u32,
    /// Half-power azimuth beamwidth, radians.
    pub bw_azimuth: f64,
    /// Half-power elevation beamwidth, radians.
    pub bw_elevation: f64,
    pub gain_main: f64,
    pub gain_side: f64,
}

impl UpaPattern {
    /// Builds the pattern of a `√N × √N` array. `N` must be a perfect square
    /// of at least 4.
    pub fn from_count(n: u32) -> Result<Self> {
        let side = (n as f64).sqrt().round() as u32;
        if n < 4 || side * side != n {
            return Err(Error::param(
                "n_antennas",
                format!("must be a perfect square >= 4, got {n}"),
            ));
        }
        let nf = n as f64;
        let sqrt_n = side as f64;
        let bw = (3.0 / nf).sqrt();
        let c = 3f64.sqrt() / (2.0 * PI);
        let s = (3f64.sqrt() / (2.0 * sqrt_n)).sin();
        let gain_side = (sqrt_n - c * nf * s) / (sqrt_n - c * s);
        Ok(Self {
            n_antennas: n,
            bw_azimuth: bw,
            bw_elevation: bw,
            gain_main: nf,
            gain_side,
        })
    }

    /// Probability that a uniformly random azimuth falls in the main lobe.
    pub fn p_azimuth(&self) -> f64 {
        self.bw_azimuth / (2.0 * PI)
    }
}

/// Two-point gain law of one interfering UAV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfererGainDist {
    pub p_main: f64,
    pub p_side: f64,
    pub gain_main: f64,
    pub gain_side: f64,
}

impl InterfererGainDist {
    fn new(p_main: f64, pattern: &UpaPattern) -> Self {
        let p_main = p_main.clamp(0.0, 1.0);
        Self {
            p_main,
            p_side: 1.0 - p_main,
            gain_main: pattern.gain_main,
            gain_side: pattern.gain_side,
        }
    }

    pub fn mean_gain(&self) -> f64 {
        self.p_main * self.gain_main + self.p_side * self.gain_side
    }

    /// `[(gain, probability); 2]`, main lobe first.
    pub fn atoms(&self) -> [(f64, f64); 2] {
        [(self.gain_main, self.p_main), (self.gain_side, self.p_side)]
    }
}

/// How the elevation main-lobe probability `p_φ(d)` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElevationModel {
    /// Narrow-beam mean-value form
    /// `2πλ Δφ exp(−πλ(d²−h²)) · d²√(d²−h²)/h`, clamped to `[0, 1]`.
    #[default]
    MeanValue,
    /// Exact probability that the steered elevation lies in
    /// `[φ₀ − Δφ/2, φ₀ + Δφ/2]`, written as a difference of serving-distance
    /// CDF values.
    CdfDifference,
    /// Steered elevation uniform on `[0, π/2)`: `p_φ = Δφ/(π/2)`.
    Uniform,
}

/// Mean-value (narrow-beam) elevation probability, clamped into `[0, 1]`.
pub fn p_elevation(d: f64, lambda_m: f64, h: f64, pattern: &UpaPattern) -> Result<f64> {
    check_slant(d, h)?;
    Ok(p_elevation_mean_value(d, lambda_m, h, pattern.bw_elevation))
}

/// Exact elevation probability `F(h/cos(φ₀+Δφ/2)) − F(h/cos(φ₀−Δφ/2))` with
/// `φ₀ = arccos(h/d)`, the beam edges clipped to `[0, π/2]`.
pub fn p_elevation_cdf_difference(
    d: f64,
    lambda_m: f64,
    h: f64,
    pattern: &UpaPattern,
) -> Result<f64> {
    check_slant(d, h)?;
    Ok(cdf_difference(d, lambda_m, h, pattern.bw_elevation))
}

fn check_slant(d: f64, h: f64) -> Result<()> {
    if !(d.is_finite() && d >= h) {
        return Err(Error::Domain(format!(
            "slant distance {d} is below the UAV height {h}"
        )));
    }
    Ok(())
}

fn p_elevation_mean_value(d: f64, lambda_m: f64, h: f64, bw: f64) -> f64 {
    let excess = (d * d - h * h).max(0.0);
    let v = 2.0 * PI * lambda_m * bw * (-PI * lambda_m * excess).exp() * d * d * excess.sqrt() / h;
    v.clamp(0.0, 1.0)
}

fn cdf_difference(d: f64, lambda_m: f64, h: f64, bw: f64) -> f64 {
    let phi0 = (h / d).clamp(-1.0, 1.0).acos();
    let lo = (phi0 - 0.5 * bw).max(0.0);
    let hi = phi0 + 0.5 * bw;
    // Survival S(r) = exp(−πλ(r² − h²)); with r = h/cos φ, r² − h² = h² tan² φ.
    let surv = |phi: f64| {
        if phi >= FRAC_PI_2 {
            0.0
        } else {
            let t = phi.tan();
            (-PI * lambda_m * h * h * t * t).exp()
        }
    };
    (surv(lo) - surv(hi)).clamp(0.0, 1.0)
}

/// Gain law of an interferer at slant distance `d` using the mean-value
/// elevation model.
pub fn interferer_gain_dist(
    d: f64,
    lambda_m: f64,
    h: f64,
    pattern: &UpaPattern,
) -> Result<InterfererGainDist> {
    let p_phi = p_elevation(d, lambda_m, h, pattern)?;
    Ok(InterfererGainDist::new(pattern.p_azimuth() * p_phi, pattern))
}

/// Everything needed to evaluate the interferer gain law at any distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainModel {
    pub pattern: UpaPattern,
    pub lambda_m: f64,
    pub height: f64,
    pub elevation: ElevationModel,
}

impl GainModel {
    pub fn new(pattern: UpaPattern, lambda_m: f64, height: f64, elevation: ElevationModel) -> Self {
        Self {
            pattern,
            lambda_m,
            height,
            elevation,
        }
    }

    /// `p_φ(d)`; distances below `h` are treated as `h`.
    pub fn p_elevation(&self, d: f64) -> f64 {
        let d = d.max(self.height);
        let bw = self.pattern.bw_elevation;
        match self.elevation {
            ElevationModel::MeanValue => p_elevation_mean_value(d, self.lambda_m, self.height, bw),
            ElevationModel::CdfDifference => cdf_difference(d, self.lambda_m, self.height, bw),
            ElevationModel::Uniform => (bw / FRAC_PI_2).clamp(0.0, 1.0),
        }
    }

    pub fn p_main(&self, d: f64) -> f64 {
        (self.pattern.p_azimuth() * self.p_elevation(d)).clamp(0.0, 1.0)
    }

    pub fn dist(&self, d: f64) -> InterfererGainDist {
        InterfererGainDist::new(self.p_main(d), &self.pattern)
    }

    /// Serving-distance law of the mmWave tier the gain model was built for.
    pub fn serving_law(&self) -> Result<ServingDistanceDist> {
        ServingDistanceDist::new(self.lambda_m, self.height)
    }
}

/// Azimuth (radians, `None` when directly below) and elevation from nadir
/// of a ground point as seen from a UAV hovering over `uav` at `height`.
fn look_angles(uav: Point2, height: f64, target: Point2) -> (Option<f64>, f64) {
    let v = target - uav;
    let planar = v.norm();
    let elevation = planar.atan2(height);
    let azimuth = if planar > 0.0 { Some(v.y.atan2(v.x)) } else { None };
    (azimuth, elevation)
}

fn azimuth_offset(a: f64, b: f64) -> f64 {
    let diff = (a - b).rem_euclid(2.0 * PI);
    diff.min(2.0 * PI - diff)
}

/// Gain of a UAV at `uav` (height `height`) toward `probe` when its main lobe
/// is steered at `steer_target`. Hard-edged sector: `G_M` inside the
/// `Δθ × Δφ` window around the beam direction, `G_S` elsewhere.
pub fn geometric_gain(
    uav: Point2,
    height: f64,
    steer_target: Point2,
    probe: Point2,
    pattern: &UpaPattern,
) -> f64 {
    if in_main_lobe(uav, height, steer_target, probe, pattern) {
        pattern.gain_main
    } else {
        pattern.gain_side
    }
}

pub fn in_main_lobe(
    uav: Point2,
    height: f64,
    steer_target: Point2,
    probe: Point2,
    pattern: &UpaPattern,
) -> bool {
    let (beam_az, beam_el) = look_angles(uav, height, steer_target);
    let (probe_az, probe_el) = look_angles(uav, height, probe);
    if (probe_el - beam_el).abs() > 0.5 * pattern.bw_elevation {
        return false;
    }
    match (beam_az, probe_az) {
        (Some(a), Some(b)) => azimuth_offset(a, b) <= 0.5 * pattern.bw_azimuth,
        // Undefined azimuth at nadir: the sector test degenerates to elevation only.
        _ => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn upa64() -> UpaPattern {
        UpaPattern::from_count(64).unwrap()
    }

    #[test]
    fn table_values() {
        let p = upa64();
        assert_relative_eq!(p.bw_azimuth, 0.21651, max_relative = 1e-4);
        assert_eq!(p.bw_azimuth, p.bw_elevation);
        assert_eq!(p.gain_main, 64.0);
        assert_relative_eq!(p.gain_side, 0.7646, max_relative = 1e-4);

        let p4 = UpaPattern::from_count(4).unwrap();
        assert_relative_eq!(p4.bw_azimuth, 0.86603, max_relative = 1e-4);
        assert_eq!(p4.gain_main, 4.0);
        assert_relative_eq!(p4.gain_side, 0.8159, max_relative = 1e-4);

        assert_eq!(UpaPattern::from_count(9).unwrap().gain_main, 9.0);
    }

    #[test]
    fn rejects_non_square_counts() {
        for n in [0, 1, 2, 3, 8, 63, 65] {
            assert!(UpaPattern::from_count(n).is_err(), "N={n}");
        }
    }

    #[test]
    fn side_lobe_gain_decreases_with_array_size() {
        let gs: Vec<f64> = [4, 16, 64, 256]
            .iter()
            .map(|&n| UpaPattern::from_count(n).unwrap().gain_side)
            .collect();
        assert!(gs.windows(2).all(|w| w[1] < w[0]), "{gs:?}");
        assert!(gs.iter().all(|&g| 0.0 < g && g < 1.0));
    }

    #[test]
    fn elevation_probability_examples() {
        let p = upa64();
        assert_eq!(p_elevation(50.0, 5e-4, 50.0, &p).unwrap(), 0.0);
        let v = p_elevation(60.0, 5e-4, 50.0, &p).unwrap();
        assert_relative_eq!(v, 0.2888, max_relative = 1e-3);
        let exact = p_elevation_cdf_difference(60.0, 5e-4, 50.0, &p).unwrap();
        assert_relative_eq!(v, exact, max_relative = 0.05);
        assert!(p_elevation(500.0, 5e-4, 50.0, &p).unwrap() < 1e-50);
        assert!(p_elevation(49.0, 5e-4, 50.0, &p).is_err());
    }

    #[test]
    fn gain_distribution_examples() {
        let p = upa64();
        let at_h = interferer_gain_dist(50.0, 5e-4, 50.0, &p).unwrap();
        assert_eq!((at_h.p_main, at_h.p_side), (0.0, 1.0));
        let g = interferer_gain_dist(60.0, 5e-4, 50.0, &p).unwrap();
        assert_relative_eq!(g.p_main, 0.009952, max_relative = 1e-3);
        assert_eq!(g.p_main + g.p_side, 1.0);
    }

    #[test]
    fn clamps_when_the_approximation_exceeds_one() {
        // Unclamped value is ≈ 2.2 here.
        let p = UpaPattern::from_count(4).unwrap();
        let d = (2500.0f64 + 0.5 / (PI * 1e-3)).sqrt();
        assert_eq!(p_elevation(d, 1e-3, 50.0, &p).unwrap(), 1.0);
        let g = interferer_gain_dist(d, 1e-3, 50.0, &p).unwrap();
        assert_relative_eq!(g.p_main, p.p_azimuth(), max_relative = 1e-15);
    }

    #[test]
    fn uniform_elevation_is_constant() {
        let m = GainModel::new(upa64(), 5e-4, 50.0, ElevationModel::Uniform);
        assert_eq!(m.p_elevation(55.0), m.p_elevation(500.0));
        assert_relative_eq!(m.p_elevation(55.0), 0.21651 / FRAC_PI_2, max_relative = 1e-4);
    }

    #[test]
    fn geometric_gain_examples() {
        let p = upa64();
        let uav = Point2::ORIGIN;
        let target = Point2::new(10.0, 0.0);
        assert_eq!(geometric_gain(uav, 50.0, target, target, &p), p.gain_main);
        let opposite = Point2::new(-10.0, 0.0);
        assert_eq!(geometric_gain(uav, 50.0, target, opposite, &p), p.gain_side);
    }

    #[test]
    fn nadir_probe_uses_elevation_only() {
        let p = upa64();
        let uav = Point2::new(5.0, 5.0);
        // Beam elevation atan(4/50) ≈ 0.08 < Δφ/2 ≈ 0.108.
        assert!(in_main_lobe(uav, 50.0, Point2::new(9.0, 5.0), uav, &p));
        // Beam elevation atan(10/50) ≈ 0.197 > Δφ/2.
        assert!(!in_main_lobe(uav, 50.0, Point2::new(15.0, 5.0), uav, &p));
        // Both at nadir.
        assert!(in_main_lobe(uav, 50.0, uav, uav, &p));
    }

    #[test]
    fn azimuth_offset_wraps() {
        assert_abs_diff_eq!(azimuth_offset(0.1, 2.0 * PI - 0.1), 0.2, epsilon = 1e-12);
        assert_abs_diff_eq!(azimuth_offset(-PI + 0.05, PI - 0.05), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn elevation_probability_vanishes_at_both_ends() {
        let m = GainModel::new(upa64(), 5e-4, 50.0, ElevationModel::MeanValue);
        assert_eq!(m.p_elevation(50.0), 0.0);
        assert!(m.p_elevation(50.0 + 1e-9) < 1e-3);
        assert!(m.p_elevation(1e4) == 0.0);
        // Continuity on a fine grid.
        let mut prev = m.p_elevation(50.0);
        // √(d − h) makes the slope unbounded at h, so refine the grid there.
        let grid = (1..=2000).map(|i| 50.0 + i as f64 * 5e-4).chain((1..=2000).map(|i| 51.0 + i as f64 * 0.05));
        for d in grid {
            let v = m.p_elevation(d);
            assert!((v - prev).abs() < 0.01, "jump at d={d}");
            prev = v;
        }
    }

    proptest! {
        #[test]
        fn p_main_bounded_by_azimuth_share(d in 50.0f64..2000.0, lam in 1e-6f64..1e-2) {
            let p = upa64();
            let g = interferer_gain_dist(d, lam, 50.0, &p).unwrap();
            prop_assert!(g.p_main >= 0.0 && g.p_main <= p.p_azimuth());
            prop_assert_eq!(g.p_main + g.p_side, 1.0);
        }

        #[test]
        fn geometric_gain_rotation_invariant(
            ux in -200.0f64..200.0, uy in -200.0f64..200.0,
            tr in 0.0f64..150.0, ta in 0.0f64..(2.0 * PI),
            pr in 0.0f64..150.0, pa in 0.0f64..(2.0 * PI),
            rot in 0.0f64..(2.0 * PI),
        ) {
            let p = upa64();
            let uav = Point2::new(ux, uy);
            let steer = uav + Point2::from_polar(tr, ta);
            let probe = uav + Point2::from_polar(pr, pa);
            let rotate = |q: Point2| uav + Point2::from_polar((q - uav).norm(), (q - uav).y.atan2((q - uav).x) + rot);
            let base = in_main_lobe(uav, 50.0, steer, probe, &p);
            let rotated = in_main_lobe(uav, 50.0, rotate(steer), rotate(probe), &p);
            // Skip configurations sitting on a beam edge, where rounding decides.
            let (ba, be) = look_angles(uav, 50.0, steer);
            let (pa_, pe) = look_angles(uav, 50.0, probe);
            let near_edge = ((pe - be).abs() - 0.5 * p.bw_elevation).abs() < 1e-9
                || matches!((ba, pa_), (Some(a), Some(b)) if (azimuth_offset(a, b) - 0.5 * p.bw_azimuth).abs() < 1e-9);
            if !near_edge {
                prop_assert_eq!(base, rotated);
            }
        }
    }
}
