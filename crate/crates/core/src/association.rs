//! Biased band selection: the adaptive bias factor, its inputs and the
//! resulting mmWave association probability.

use serde::{Deserialize, Serialize};

use crate::analysis::Analysis;
use crate::error::{ensure_positive, Error, Result};
use crate::params::{Band, NetworkParams};
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureSpec};

/// Standardization `ζ = P_lf K_lf E[r_lf^{−α_lf}] / (P_m G_M K_m E[r_m^{−α_m}])`.
pub fn zeta(params: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    let lf = &params.lf;
    let mm = &params.mm;
    let e_lf = params
        .serving_law(Band::LowFrequency)?
        .mean_inverse_pathloss(lf.pathloss_exp, spec)?;
    let e_mm = params
        .serving_law(Band::MmWave)?
        .mean_inverse_pathloss(mm.pathloss_exp, spec)?;
    let num = lf.tx_power_w * lf.pathloss_const() * e_lf;
    let den = mm.tx_power_w * params.pattern.gain_main * mm.pathloss_const() * e_mm;
    let z = num / den;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Numeric(format!("standardization factor is {z}")));
    }
    Ok(z)
}

/// `β = ζ β₀ / (1 + (β₀ − 1) e^{α(1 − τ)})`.
pub fn bias_factor(beta0: f64, growth: f64, zeta: f64, tau: f64) -> Result<f64> {
    if !(beta0.is_finite() && beta0 > 1.0) {
        return Err(Error::param("beta0", format!("must be > 1, got {beta0}")));
    }
    ensure_positive("growth", growth)?;
    ensure_positive("zeta", zeta)?;
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::param("tau", format!("must be >= 0, got {tau}")));
    }
    // For huge τ the exponential underflows to 0 and β saturates at ζβ₀.
    Ok(zeta * beta0 / (1.0 + (beta0 - 1.0) * (growth * (1.0 - tau)).exp()))
}

/// `τ = SE_m / SE_lf` from the per-band unconditional spectral efficiencies.
pub fn se_ratio_tau(analysis: &Analysis) -> Result<f64> {
    let se_lf = analysis.se_lf()?;
    if !(se_lf > 0.0) {
        return Err(Error::Degenerate(format!(
            "low-frequency spectral efficiency is {se_lf}; the SE ratio is undefined"
        )));
    }
    Ok(analysis.se_mm()? / se_lf)
}

/// Result of one biased association decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssociationOutcome {
    pub band: Band,
    pub serving_distance: f64,
}

/// Picks mmWave iff `β P_m G_M K_m d_m^{−α_m} ≥ P_lf K_lf d_lf^{−α_lf}`.
pub fn associate(d_lf: f64, d_m: f64, beta: f64, params: &NetworkParams) -> AssociationOutcome {
    let s_lf = params.mean_received_power(Band::LowFrequency, d_lf);
    let s_m = params.mean_received_power(Band::MmWave, d_m);
    prefer(s_lf, s_m, beta, d_lf, d_m)
}

pub(crate) fn prefer(s_lf: f64, s_m: f64, beta: f64, d_lf: f64, d_m: f64) -> AssociationOutcome {
    if beta * s_m >= s_lf {
        AssociationOutcome {
            band: Band::MmWave,
            serving_distance: d_m,
        }
    } else {
        AssociationOutcome {
            band: Band::LowFrequency,
            serving_distance: d_lf,
        }
    }
}

/// `A_m(β) = ∫_h^∞ (1 − F_lf(max(h, η^{1/α_lf} r^{α_m/α_lf}))) f_m(r) dr`
/// with `η = P_lf K_lf / (β P_m G_M K_m)`.
pub fn assoc_prob_mmwave(beta: f64, params: &NetworkParams, spec: &QuadratureSpec) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::param("beta", format!("must be > 0, got {beta}")));
    }
    if beta.is_infinite() {
        return Ok(1.0);
    }
    let lf = &params.lf;
    let mm = &params.mm;
    let law_lf = params.serving_law(Band::LowFrequency)?;
    let law_m = params.serving_law(Band::MmWave)?;
    let h = params.height;
    let eta = lf.tx_power_w * lf.pathloss_const()
        / (beta * mm.tx_power_w * params.pattern.gain_main * mm.pathloss_const());
    let a_lf = lf.pathloss_exp;
    let a_m = mm.pathloss_exp;
    let coef = eta.powf(1.0 / a_lf);
    let integrand = |r: f64| {
        let arg = (coef * r.powf(a_m / a_lf)).max(h);
        law_lf.survival(arg) * law_m.pdf(r)
    };
    // Below the kink r_k the survival factor is exactly 1.
    let kink = (h / coef).powf(a_lf / a_m);
    let value = if kink > h {
        let flat = law_m.cdf(kink);
        if flat >= 1.0 {
            return Ok(1.0);
        }
        flat + integrate_semi_infinite_scaled(integrand, kink, law_m.scale(), spec)?
    } else {
        integrate_semi_infinite_scaled(integrand, h, law_m.scale(), spec)?
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Association fraction for one policy expressed as an explicit `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrePolicy {
    pub beta0: f64,
    pub growth: f64,
    pub zeta: f64,
    pub tau: f64,
    pub beta: f64,
}

impl CrePolicy {
    pub fn new(beta0: f64, growth: f64, zeta: f64, tau: f64) -> Result<Self> {
        let beta = bias_factor(beta0, growth, zeta, tau)?;
        Ok(Self {
            beta0,
            growth,
            zeta,
            tau,
            beta,
        })
    }

    /// `ζ` and `τ` evaluated on the network the analysis is bound to.
    pub fn from_network(analysis: &Analysis, beta0: f64, growth: f64) -> Result<Self> {
        let zeta = zeta(analysis.params(), analysis.quadrature())?;
        let tau = se_ratio_tau(analysis)?;
        Self::new(beta0, growth, zeta, tau)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::UpaPattern;
    use crate::params::Fading;
    use crate::quadrature::integrate;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    /// Both tiers identical and no array gain.
    fn symmetric() -> NetworkParams {
        let mut p = NetworkParams::reference_profile();
        p.mm = p.lf;
        let mut pat = UpaPattern::from_count(4).unwrap();
        pat.gain_main = 1.0;
        pat.gain_side = 1.0;
        p.pattern = pat;
        p
    }

    #[test]
    fn zeta_is_one_for_symmetric_tiers() {
        assert_relative_eq!(zeta(&symmetric(), &spec()).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zeta_linear_in_low_band_power() {
        let p = NetworkParams::reference_profile();
        let mut q = p;
        q.lf.tx_power_w *= 2.0;
        let a = zeta(&p, &spec()).unwrap();
        let b = zeta(&q, &spec()).unwrap();
        assert_relative_eq!(b, 2.0 * a, max_relative = 1e-12);
    }

    #[test]
    fn bias_factor_reference_points() {
        assert_relative_eq!(bias_factor(5.0, 1.0, 1.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(bias_factor(7.0, 3.0, 2.5, 1.0).unwrap(), 2.5, max_relative = 1e-15);
        let low = bias_factor(5.0, 1.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(low, 5.0 / (1.0 + 4.0 * std::f64::consts::E), epsilon = 1e-15);
        assert_abs_diff_eq!(low, 0.42112, epsilon = 1e-5);
        assert_abs_diff_eq!(bias_factor(5.0, 1.0, 1.0, 1e6).unwrap(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn bias_factor_rejects_bad_inputs() {
        assert!(bias_factor(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(bias_factor(5.0, 0.0, 1.0, 1.0).is_err());
        assert!(bias_factor(5.0, 1.0, -1.0, 1.0).is_err());
        assert!(bias_factor(5.0, 1.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn association_extremes_and_ties() {
        let p = NetworkParams::reference_profile();
        assert_eq!(associate(50.0, 5000.0, f64::INFINITY, &p).band, Band::MmWave);
        assert_eq!(associate(5000.0, 50.0, 1e-300, &p).band, Band::LowFrequency);
        let s = p.mean_received_power(Band::LowFrequency, 80.0);
        let s_m = p.mean_received_power(Band::MmWave, 80.0);
        // β chosen so the biased powers are equal.
        let out = prefer(s, s_m, s / s_m, 80.0, 90.0);
        assert_eq!(out.band, Band::MmWave);
        assert_eq!(out.serving_distance, 90.0);
    }

    #[test]
    fn assoc_prob_limits() {
        let p = NetworkParams::reference_profile();
        assert_eq!(assoc_prob_mmwave(f64::INFINITY, &p, &spec()).unwrap(), 1.0);
        assert!(assoc_prob_mmwave(1e12, &p, &spec()).unwrap() > 0.999_999);
        let mut sparse = p;
        sparse.mm.density = 1e-12;
        assert!(assoc_prob_mmwave(1.0, &sparse, &spec()).unwrap() < 1e-3);
        assert!(assoc_prob_mmwave(0.0, &p, &spec()).is_err());
    }

    #[test]
    fn assoc_prob_matches_unsplit_quadrature() {
        let p = NetworkParams::reference_profile();
        let law_lf = p.serving_law(Band::LowFrequency).unwrap();
        let law_m = p.serving_law(Band::MmWave).unwrap();
        for beta in [0.3, 1.0, 8.0] {
            let eta = p.lf.tx_power_w * p.lf.pathloss_const()
                / (beta * p.mm.tx_power_w * p.pattern.gain_main * p.mm.pathloss_const());
            let brute = integrate(
                |r| {
                    let arg = (eta.powf(0.4) * r.powf(1.2)).max(p.height);
                    law_lf.survival(arg) * law_m.pdf(r)
                },
                p.height,
                p.height + 2000.0,
                &QuadratureSpec::new(1e-12, 1e-15, 20_000).unwrap(),
            )
            .unwrap();
            let a = assoc_prob_mmwave(beta, &p, &spec()).unwrap();
            assert_abs_diff_eq!(a, brute, epsilon = 1e-7);
        }
    }

    #[test]
    fn identical_tiers_split_evenly() {
        let p = symmetric();
        assert_abs_diff_eq!(assoc_prob_mmwave(1.0, &p, &spec()).unwrap(), 0.5, epsilon = 1e-9);
    }

    #[test]
    fn tau_is_one_for_identical_tiers() {
        let mut p = symmetric();
        p.mm.fading = Fading::Rayleigh;
        let a = Analysis::new(p, spec()).unwrap();
        let tau = se_ratio_tau(&a).unwrap();
        assert_relative_eq!(tau, 1.0, max_relative = 1e-6);
    }

    proptest! {
        #[test]
        fn bias_increasing_in_tau(t in 0.0f64..5.0, dt in 1e-3f64..5.0, b0 in 1.1f64..20.0, g in 0.1f64..3.0) {
            let a = bias_factor(b0, g, 1.3, t).unwrap();
            let b = bias_factor(b0, g, 1.3, t + dt).unwrap();
            prop_assert!(b > a);
            prop_assert!(b < 1.3 * b0);
        }

        #[test]
        fn decision_invariant_under_common_scaling(
            s_lf in 1e-15f64..1e-6, s_m in 1e-15f64..1e-6, beta in 0.01f64..100.0, k in 1e-3f64..1e3,
        ) {
            let a = prefer(s_lf, s_m, beta, 60.0, 70.0).band;
            let b = prefer(k * s_lf, k * s_m, beta, 60.0, 70.0).band;
            // Rounding can flip a decision only at an exact tie.
            let margin = (beta * s_m - s_lf).abs() / s_lf.max(beta * s_m);
            prop_assume!(margin > 1e-12);
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn assoc_prob_monotone_in_beta() {
        let p = NetworkParams::reference_profile();
        let mut prev = 0.0;
        for i in 0..30 {
            let beta = 10f64.powf(-2.0 + i as f64 * 0.15);
            let a = assoc_prob_mmwave(beta, &p, &spec()).unwrap();
            assert!(a >= prev - 1e-12, "β={beta}");
            prev = a;
        }
    }
}
