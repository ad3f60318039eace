//! Radio parameters of the two UAV tiers.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::antenna::{ElevationModel, GainModel, UpaPattern};
use crate::error::{ensure_positive, Error, Result};
use crate::geometry::ServingDistanceDist;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

/// Small-scale fading of the desired and interfering links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fading {
    /// Exponential power gain; identical to Nakagami with `m = 1`.
    Rayleigh,
    /// Gamma(m, 1/m) power gain with integer shape `m ≥ 1`.
    Nakagami(u32),
}

impl Fading {
    pub fn shape(&self) -> u32 {
        match *self {
            Fading::Rayleigh => 1,
            Fading::Nakagami(m) => m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.shape() == 0 {
            return Err(Error::param("nakagami_m", "shape must be a positive integer"));
        }
        Ok(())
    }
}

/// Per-band radio parameters, in SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandConfig {
    pub carrier_hz: f64,
    pub tx_power_w: f64,
    pub bandwidth_hz: f64,
    pub noise_w: f64,
    pub pathloss_exp: f64,
    /// UAVs per square meter.
    pub density: f64,
    pub fading: Fading,
}

impl BandConfig {
    /// Free-space constant `K = (c / 4π f_c)²`.
    pub fn pathloss_const(&self) -> f64 {
        let k = SPEED_OF_LIGHT / (4.0 * PI * self.carrier_hz);
        k * k
    }

    pub fn nakagami_m(&self) -> u32 {
        self.fading.shape()
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("carrier_hz", self.carrier_hz)?;
        ensure_positive("tx_power_w", self.tx_power_w)?;
        ensure_positive("bandwidth_hz", self.bandwidth_hz)?;
        ensure_positive("noise_w", self.noise_w)?;
        ensure_positive("density", self.density)?;
        if !(self.pathloss_exp.is_finite() && self.pathloss_exp > 2.0) {
            // The interference field of an infinite PPP is finite only for α > 2.
            return Err(Error::param(
                "pathloss_exp",
                format!("must be > 2, got {}", self.pathloss_exp),
            ));
        }
        self.fading.validate()
    }
}

/// Which tier a user is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    LowFrequency,
    MmWave,
}

/// The complete two-tier network description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkParams {
    pub lf: BandConfig,
    pub mm: BandConfig,
    /// Common UAV hover height, meters.
    pub height: f64,
    /// Ground users per square meter.
    pub user_density: f64,
    pub pattern: UpaPattern,
    pub elevation: ElevationModel,
}

impl NetworkParams {
    /// The evaluation profile: 2/60 GHz, 30/40 dBm, 20/600 MHz, `h = 50 m`,
    /// 10 and 500 UAVs/km², 5·10⁴ users/km², `N = 64`, noise −91/−76 dBm,
    /// path-loss exponents 2.5/3, Rayleigh (low band) and Nakagami-2 (mmWave).
    pub fn reference_profile() -> Self {
        Self {
            lf: BandConfig {
                carrier_hz: 2e9,
                tx_power_w: dbm_to_watts(30.0),
                bandwidth_hz: 20e6,
                noise_w: dbm_to_watts(-91.0),
                pathloss_exp: 2.5,
                density: 10e-6,
                fading: Fading::Rayleigh,
            },
            mm: BandConfig {
                carrier_hz: 60e9,
                tx_power_w: dbm_to_watts(40.0),
                bandwidth_hz: 600e6,
                noise_w: dbm_to_watts(-76.0),
                pathloss_exp: 3.0,
                density: 500e-6,
                fading: Fading::Nakagami(2),
            },
            height: 50.0,
            user_density: 5e-2,
            pattern: UpaPattern::from_count(64).expect("64 is a valid array size"),
            elevation: ElevationModel::MeanValue,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.lf.validate()?;
        self.mm.validate()?;
        ensure_positive("height", self.height)?;
        ensure_positive("user_density", self.user_density)?;
        Ok(())
    }

    pub fn band(&self, band: Band) -> &BandConfig {
        match band {
            Band::LowFrequency => &self.lf,
            Band::MmWave => &self.mm,
        }
    }

    pub fn serving_law(&self, band: Band) -> Result<ServingDistanceDist> {
        ServingDistanceDist::new(self.band(band).density, self.height)
    }

    pub fn gain_model(&self) -> GainModel {
        GainModel::new(self.pattern, self.mm.density, self.height, self.elevation)
    }

    /// Transmit-side gain of the serving link (`G_M` for mmWave, 1 otherwise).
    pub fn serving_gain(&self, band: Band) -> f64 {
        match band {
            Band::LowFrequency => 1.0,
            Band::MmWave => self.pattern.gain_main,
        }
    }

    /// Average received power `P·G·K·d^{−α}` from a UAV at slant distance `d`.
    pub fn mean_received_power(&self, band: Band, d: f64) -> f64 {
        let cfg = self.band(band);
        cfg.tx_power_w * self.serving_gain(band) * cfg.pathloss_const() * d.powf(-cfg.pathloss_exp)
    }

    pub fn with_antennas(mut self, n: u32) -> Result<Self> {
        self.pattern = UpaPattern::from_count(n)?;
        Ok(self)
    }

    pub fn with_elevation(mut self, elevation: ElevationModel) -> Self {
        self.elevation = elevation;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pathloss_constant_from_carrier() {
        let p = NetworkParams::reference_profile();
        assert_relative_eq!(p.lf.pathloss_const(), 1.4229e-4, max_relative = 1e-4);
        assert_relative_eq!(p.mm.pathloss_const(), 1.5810e-7, max_relative = 1e-4);
    }

    #[test]
    fn unit_conversions() {
        assert_relative_eq!(dbm_to_watts(30.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(dbm_to_watts(40.0), 10.0, max_relative = 1e-15);
        assert_relative_eq!(linear_to_db(db_to_linear(-7.5)), -7.5, max_relative = 1e-14);
    }

    #[test]
    fn rayleigh_is_nakagami_one() {
        assert_eq!(Fading::Rayleigh.shape(), Fading::Nakagami(1).shape());
        assert!(Fading::Nakagami(0).validate().is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut p = NetworkParams::reference_profile();
        assert!(p.validate().is_ok());
        p.lf.density = -1.0;
        assert!(p.validate().is_err());
        let mut p = NetworkParams::reference_profile();
        p.mm.pathloss_exp = 2.0;
        assert!(p.validate().is_err());
    }
}
