use super::bell::{binomial, factorial};
use super::Analysis;
use crate::association::assoc_prob_mmwave;
use crate::error::{Error, Result};
use crate::params::Band;
use crate::quadrature::integrate_semi_infinite_scaled;

fn check_threshold(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || gamma.is_nan() {
        return Err(Error::Domain(format!("SINR threshold must be > 0, got {gamma}")));
    }
    Ok(())
}

impl Analysis {
    /// Outer integral `∫_h^∞ g(r) f_R(r) dr` over the serving distance of `band`.
    pub(crate) fn over_serving_distance<F>(&self, band: Band, g: F) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64>,
    {
        let law = self.params.serving_law(band)?;
        let failure = std::cell::RefCell::new(None);
        let integrand = |r: f64| {
            let pdf = law.pdf(r);
            if pdf == 0.0 {
                return 0.0;
            }
            match g(r) {
                Ok(v) => v * pdf,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let value = integrate_semi_infinite_scaled(integrand, law.height(), law.scale(), &self.quad);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        value
    }

    /// `P(SINR_lf > γ)` for a user served by its nearest low-band UAV;
    /// `γ` is linear.
    pub fn coverage_lf(&self, gamma: f64) -> Result<f64> {
        check_threshold(gamma)?;
        let cfg = &self.params.lf;
        let pk = cfg.tx_power_w * cfg.pathloss_const();
        let v = self.over_serving_distance(Band::LowFrequency, |r| {
            let u = gamma * r.powf(cfg.pathloss_exp) / pk;
            let noise = (-cfg.noise_w * u).exp();
            if noise == 0.0 {
                return Ok(0.0);
            }
            Ok(noise * self.laplace_lf(u, r)?)
        })?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// `P(SINR_m > γ)` for a user served by its nearest mmWave UAV, using the
    /// Gamma-fading series with Laplace-transform derivatives.
    pub fn coverage_mm(&self, gamma: f64) -> Result<f64> {
        check_threshold(gamma)?;
        let cfg = &self.params.mm;
        let m = cfg.nakagami_m();
        let signal = cfg.tx_power_w * self.params.pattern.gain_main * cfg.pathloss_const();
        let noise = cfg.noise_w;
        let v = self.over_serving_distance(Band::MmWave, |r| {
            let u = gamma * m as f64 * r.powf(cfg.pathloss_exp) / signal;
            let noise_term = (-noise * u).exp();
            if noise_term == 0.0 || !u.is_finite() {
                return Ok(0.0);
            }
            let derivs = self.laplace_mm_derivatives(m - 1, u, r)?;
            let mut total = 0.0;
            for k in 0..m {
                let mut inner = 0.0;
                for i in 0..=k {
                    let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                    inner += binomial(k, i)
                        * noise.powi((k - i) as i32)
                        * sign
                        * derivs[i as usize];
                }
                total += u.powi(k as i32) / factorial(k) * inner;
            }
            Ok(total * noise_term)
        })?;
        Ok(v.clamp(0.0, 1.0))
    }

    /// Rayleigh-form mmWave coverage `∫ exp(−σ² u) L_m(u | r) f(r) dr`,
    /// coded without the derivative series. Only defined for `m = 1`.
    pub fn coverage_mm_rayleigh(&self, gamma: f64) -> Result<f64> {
        check_threshold(gamma)?;
        let cfg = &self.params.mm;
        if cfg.nakagami_m() != 1 {
            return Err(Error::param(
                "nakagami_m",
                "the Rayleigh-form coverage requires m = 1",
            ));
        }
        let signal = cfg.tx_power_w * self.params.pattern.gain_main * cfg.pathloss_const();
        let v = self.over_serving_distance(Band::MmWave, |r| {
            let u = gamma * r.powf(cfg.pathloss_exp) / signal;
            let noise_term = (-cfg.noise_w * u).exp();
            if noise_term == 0.0 {
                return Ok(0.0);
            }
            Ok(noise_term * self.laplace_mm(u, r)?)
        })?;
        Ok(v.clamp(0.0, 1.0))
    }

    pub fn coverage(&self, band: Band, gamma: f64) -> Result<f64> {
        match band {
            Band::LowFrequency => self.coverage_lf(gamma),
            Band::MmWave => self.coverage_mm(gamma),
        }
    }

    /// `P_C(γ) = P_lf(γ)·A_lf + P_m(γ)·A_m` for bias `β`.
    pub fn coverage_total(&self, gamma: f64, beta: f64) -> Result<f64> {
        let a_m = assoc_prob_mmwave(beta, &self.params, &self.quad)?;
        self.coverage_mixed(gamma, a_m)
    }

    /// Convex mix of the per-band coverages with a given mmWave share.
    pub fn coverage_mixed(&self, gamma: f64, a_m: f64) -> Result<f64> {
        let a_m = a_m.clamp(0.0, 1.0);
        let lf = if a_m < 1.0 { self.coverage_lf(gamma)? } else { 0.0 };
        let mm = if a_m > 0.0 { self.coverage_mm(gamma)? } else { 0.0 };
        Ok((lf * (1.0 - a_m) + mm * a_m).clamp(0.0, 1.0))
    }
}
