//! Closed-form network metrics evaluated by numerical quadrature.

mod bell;
mod coverage;
mod laplace;
mod se;

pub use bell::{binomial, complete_bell, factorial, rising_factorial};
pub use se::{hamdi_kernel, hamdi_kernel_literal};

use serde::{Deserialize, Serialize};

use crate::antenna::GainModel;
use crate::association::assoc_prob_mmwave;
use crate::error::{Error, Result};
use crate::params::{db_to_linear, Band, NetworkParams};
use crate::quadrature::QuadratureSpec;

/// Analytic evaluator bound to one network description.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub(crate) params: NetworkParams,
    pub(crate) quad: QuadratureSpec,
    pub(crate) gain_model: GainModel,
}

impl Analysis {
    pub fn new(params: NetworkParams, quad: QuadratureSpec) -> Result<Self> {
        params.validate()?;
        quad.validate()?;
        Ok(Self {
            params,
            quad,
            gain_model: params.gain_model(),
        })
    }

    pub fn params(&self) -> &NetworkParams {
        &self.params
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn gain_model(&self) -> &GainModel {
        &self.gain_model
    }

    pub fn assoc_prob_mmwave(&self, beta: f64) -> Result<f64> {
        assoc_prob_mmwave(beta, &self.params, &self.quad)
    }

    /// Mean per-user rate in bit/s for a given mmWave share.
    pub fn per_user_rate_mixed(&self, a_m: f64, load: LoadModel) -> Result<f64> {
        let se_lf = self.se_lf()?;
        let se_m = self.se_mm()?;
        Ok(rate_from_parts(&self.params, a_m, se_lf, se_m, load))
    }

    /// Mean per-user rate for bias `β`.
    pub fn per_user_rate(&self, beta: f64, load: LoadModel) -> Result<f64> {
        let a_m = self.assoc_prob_mmwave(beta)?;
        self.per_user_rate_mixed(a_m, load)
    }

    /// Everything in one pass: coverage over `gamma_db`, association, SE and
    /// rate for bias `β`.
    pub fn metrics(&self, beta: f64, gamma_db: &[f64], load: LoadModel) -> Result<MetricSet> {
        let a_m = self.assoc_prob_mmwave(beta)?;
        let coverage = gamma_db
            .iter()
            .map(|&db| Ok((db, self.coverage_mixed(db_to_linear(db), a_m)?)))
            .collect::<Result<Vec<_>>>()?;
        let se_lf = self.se_lf()?;
        let se_m = self.se_mm()?;
        Ok(MetricSet {
            coverage,
            assoc_mm: a_m,
            se_lf,
            se_m,
            se_total: a_m * se_m + (1.0 - a_m) * se_lf,
            rate_per_user: rate_from_parts(&self.params, a_m, se_lf, se_m, load),
            provenance: Provenance::Analytic,
        })
    }
}

/// How a band's bandwidth is shared among the users it serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoadModel {
    /// Each user is granted its band's full bandwidth: `L_t = 1`.
    #[default]
    Unit,
    /// Bandwidth split over the mean number of users per UAV,
    /// `L_t = max(1, λ·A_t/λ_t)`.
    MeanLoad,
}

impl LoadModel {
    pub fn load(&self, params: &NetworkParams, band: Band, share: f64) -> f64 {
        match self {
            LoadModel::Unit => 1.0,
            LoadModel::MeanLoad => {
                (params.user_density * share / params.band(band).density).max(1.0)
            }
        }
    }
}

/// `A_m (W_m/L_m) SE_m + A_lf (W_lf/L_lf) SE_lf`.
pub fn rate_from_parts(
    params: &NetworkParams,
    a_m: f64,
    se_lf: f64,
    se_m: f64,
    load: LoadModel,
) -> f64 {
    let a_lf = 1.0 - a_m;
    let term = |band: Band, share: f64, se: f64| {
        if share <= 0.0 {
            0.0
        } else {
            share * params.band(band).bandwidth_hz / load.load(params, band, share) * se
        }
    };
    term(Band::MmWave, a_m, se_m) + term(Band::LowFrequency, a_lf, se_lf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Analytic,
    Empirical,
}

/// Network-level metrics from either engine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    /// `(γ in dB, coverage probability)`.
    pub coverage: Vec<(f64, f64)>,
    pub assoc_mm: f64,
    pub se_lf: f64,
    pub se_m: f64,
    pub se_total: f64,
    /// bit/s.
    pub rate_per_user: f64,
    pub provenance: Provenance,
}

impl MetricSet {
    pub fn assoc_lf(&self) -> f64 {
        1.0 - self.assoc_mm
    }

    /// Coverage at the grid point closest to `gamma_db`.
    pub fn coverage_at(&self, gamma_db: f64) -> Option<f64> {
        self.coverage
            .iter()
            .min_by(|a, b| (a.0 - gamma_db).abs().total_cmp(&(b.0 - gamma_db).abs()))
            .map(|&(_, p)| p)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.coverage.windows(2) {
            if w[1].0 > w[0].0 && w[1].1 > w[0].1 + 1e-9 && self.provenance == Provenance::Analytic {
                return Err(Error::Numeric(format!(
                    "coverage increases between {} and {} dB",
                    w[0].0, w[1].0
                )));
            }
        }
        if self.coverage.iter().any(|&(_, p)| !(0.0..=1.0).contains(&p)) {
            return Err(Error::Numeric("coverage outside [0, 1]".into()));
        }
        Ok(())
    }
}

/// `[start, start+step, …]` up to and including `stop`.
pub fn db_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step).collect()
}
