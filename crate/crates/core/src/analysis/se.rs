use std::f64::consts::LN_2;

use super::Analysis;
use crate::error::Result;
use crate::params::Band;
use crate::quadrature::integrate_semi_infinite_scaled;

/// Weight `(1 − (1+z)^{−m}) / z` that turns `E[ln(1 + g/Y)]` with
/// `g ~ Gamma(m, 1/m)` into an integral over Laplace transforms of `Y`.
///
/// For `m = 2` this is `1/z − 1/(z(1+z)²) = (2+z)/(1+z)²`; that closed form is
/// used directly since it has no cancellation at small `z`.
pub fn hamdi_kernel(z: f64, m: u32) -> f64 {
    if z <= 0.0 {
        return m as f64;
    }
    match m {
        1 => 1.0 / (1.0 + z),
        2 => (2.0 + z) / ((1.0 + z) * (1.0 + z)),
        _ => -(-(m as f64) * z.ln_1p()).exp_m1() / z,
    }
}

/// The kernel exactly as `1/z − 1/(z(1+z)²)`; loses precision for small `z`.
pub fn hamdi_kernel_literal(z: f64) -> f64 {
    1.0 / z - 1.0 / (z * (1.0 + z) * (1.0 + z))
}

impl Analysis {
    /// `E[log₂(1 + SINR_lf)]` for a user served by its nearest low-band UAV.
    pub fn se_lf(&self) -> Result<f64> {
        let cfg = &self.params.lf;
        let pk = cfg.tx_power_w * cfg.pathloss_const();
        let inner_spec = self.quad.inner();
        self.over_serving_distance(Band::LowFrequency, |r| {
            let signal = pk * r.powf(-cfg.pathloss_exp);
            let snr = signal / cfg.noise_w;
            let failure = std::cell::RefCell::new(None);
            let integrand = |t: f64| {
                let v = (t * LN_2).exp_m1() / signal;
                let noise = (-cfg.noise_w * v).exp();
                if noise == 0.0 || !v.is_finite() {
                    return 0.0;
                }
                match self.laplace_lf(v, r) {
                    Ok(l) => noise * l,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            };
            let scale = (1.0 + snr).log2().max(1.0);
            let value = integrate_semi_infinite_scaled(integrand, 0.0, scale, &inner_spec);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            value
        })
    }

    /// `E[log₂(1 + SINR_m)]` for a user served by its nearest mmWave UAV.
    pub fn se_mm(&self) -> Result<f64> {
        let cfg = &self.params.mm;
        let m = cfg.nakagami_m();
        let gain = self.params.pattern.gain_main;
        let pgk = cfg.tx_power_w * gain * cfg.pathloss_const();
        let inner_spec = self.quad.inner();
        let nats = self.over_serving_distance(Band::MmWave, |r| {
            let signal = pgk * r.powf(-cfg.pathloss_exp);
            let snr = signal / cfg.noise_w;
            let failure = std::cell::RefCell::new(None);
            let integrand = |z: f64| {
                let v = m as f64 * z / signal;
                let noise = (-cfg.noise_w * v).exp();
                if noise == 0.0 {
                    return 0.0;
                }
                match self.laplace_mm(v, r) {
                    Ok(l) => hamdi_kernel(z, m) * noise * l,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            };
            let scale = (snr / m as f64).max(1.0);
            let value = integrate_semi_infinite_scaled(integrand, 0.0, scale, &inner_spec);
            if let Some(e) = failure.into_inner() {
                return Err(e);
            }
            value
        })?;
        Ok(nats / LN_2)
    }

    pub fn se(&self, band: Band) -> Result<f64> {
        match band {
            Band::LowFrequency => self.se_lf(),
            Band::MmWave => self.se_mm(),
        }
    }
}
