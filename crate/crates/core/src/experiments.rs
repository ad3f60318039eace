//! File-driven experiment definitions and the three sweeps: coverage versus
//! SINR threshold, per-user rate versus tier density ratio and spectral
//! efficiency versus array size.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{db_grid, Analysis, LoadModel, MetricSet};
use crate::antenna::{ElevationModel, UpaPattern};
use crate::association::CrePolicy;
use crate::error::{Error, Result};
use crate::params::{dbm_to_watts, BandConfig, Fading, NetworkParams};
use crate::quadrature::QuadratureSpec;
use crate::simulator::{run_trials, GainMode, Policy, RegionRule, SimConfig, Steering, TrialBatch};

/// Radio parameters of one tier, in the units people quote them in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub carrier_ghz: f64,
    pub tx_power_dbm: f64,
    pub bandwidth_mhz: f64,
    pub noise_dbm: f64,
    pub pathloss_exp: f64,
    pub density_per_km2: f64,
    /// Fading shape; 1 is Rayleigh.
    pub nakagami_m: u32,
}

impl BandSection {
    fn to_config(&self) -> BandConfig {
        BandConfig {
            carrier_hz: self.carrier_ghz * 1e9,
            tx_power_w: dbm_to_watts(self.tx_power_dbm),
            bandwidth_hz: self.bandwidth_mhz * 1e6,
            noise_w: dbm_to_watts(self.noise_dbm),
            pathloss_exp: self.pathloss_exp,
            density: self.density_per_km2 * 1e-6,
            fading: if self.nakagami_m == 1 {
                Fading::Rayleigh
            } else {
                Fading::Nakagami(self.nakagami_m)
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub height_m: f64,
    pub user_density_per_km2: f64,
    pub antennas: u32,
    #[serde(default)]
    pub elevation_model: ElevationModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreSection {
    pub beta0: f64,
    pub growth: f64,
    /// Replaces the adaptive bias in every "cre" column when set; `1.0`
    /// reproduces max-power association.
    #[serde(default)]
    pub fixed_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub gamma_db_start: f64,
    pub gamma_db_stop: f64,
    pub gamma_db_step: f64,
    /// mmWave-to-low-band UAV density ratios; the low band stays fixed.
    pub density_ratios: Vec<f64>,
    pub antennas: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub gain_mode: GainMode,
    #[serde(default)]
    pub steering: Steering,
    /// Planar disk radius in meters; absent means the automatic rule.
    #[serde(default)]
    pub region_radius_m: Option<f64>,
    #[serde(default)]
    pub load_model: LoadModel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            rel_tol: q.rel_tol,
            abs_tol: q.abs_tol,
            max_subdivisions: q.max_subdivisions,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// Everything an experiment run needs. Loaded from TOML; unknown keys are
/// rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub low_frequency: BandSection,
    pub mmwave: BandSection,
    pub network: NetworkSection,
    pub cre: CreSection,
    pub sweep: SweepSection,
    pub simulation: SimulationSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// The shipped profile, identical to `configs/default.toml`.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.toml");

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::from_toml_str(DEFAULT_CONFIG).expect("bundled profile is valid")
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Range and consistency checks beyond what the schema enforces.
    pub fn validate(&self) -> Result<()> {
        let wrap = |section: &str, e: Error| Error::Config(format!("[{section}] {e}"));
        self.low_frequency
            .to_config()
            .validate()
            .map_err(|e| wrap("low_frequency", e))?;
        self.mmwave.to_config().validate().map_err(|e| wrap("mmwave", e))?;
        self.network_params().map_err(|e| wrap("network", e))?;
        CrePolicy::new(self.cre.beta0, self.cre.growth, 1.0, 1.0).map_err(|e| wrap("cre", e))?;
        if let Some(b) = self.cre.fixed_bias {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::Config("[cre] fixed_bias must be positive and finite".into()));
            }
        }
        let s = &self.sweep;
        if !(s.gamma_db_step > 0.0 && s.gamma_db_stop >= s.gamma_db_start) {
            return Err(Error::Config(
                "[sweep] gamma grid needs step > 0 and stop >= start".into(),
            ));
        }
        if s.density_ratios.is_empty() || s.density_ratios.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Config("[sweep] density_ratios must be non-empty and positive".into()));
        }
        for &n in &s.antennas {
            UpaPattern::from_count(n).map_err(|e| wrap("sweep", e))?;
        }
        if self.simulation.trials == 0 {
            return Err(Error::Config("[simulation] trials must be at least 1".into()));
        }
        self.region_rule().resolve(&self.network_params()?).map_err(|e| wrap("simulation", e))?;
        self.quadrature_spec().map_err(|e| wrap("quadrature", e))?;
        Ok(())
    }

    pub fn network_params(&self) -> Result<NetworkParams> {
        let p = NetworkParams {
            lf: self.low_frequency.to_config(),
            mm: self.mmwave.to_config(),
            height: self.network.height_m,
            user_density: self.network.user_density_per_km2 * 1e-6,
            pattern: UpaPattern::from_count(self.network.antennas)?,
            elevation: self.network.elevation_model,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn quadrature_spec(&self) -> Result<QuadratureSpec> {
        let q = &self.quadrature;
        QuadratureSpec::new(q.rel_tol, q.abs_tol, q.max_subdivisions)
    }

    pub fn gamma_grid(&self) -> Vec<f64> {
        let s = &self.sweep;
        db_grid(s.gamma_db_start, s.gamma_db_stop, s.gamma_db_step)
    }

    pub fn region_rule(&self) -> RegionRule {
        match self.simulation.region_radius_m {
            Some(r) => RegionRule::Fixed(r),
            None => RegionRule::Auto,
        }
    }

    pub fn cre_policy(&self) -> Policy {
        match self.cre.fixed_bias {
            Some(b) => Policy::FixedBias(b),
            None => Policy::Cre {
                beta0: self.cre.beta0,
                growth: self.cre.growth,
            },
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            n_trials: self.simulation.trials,
            gain_mode: self.simulation.gain_mode,
            policy: self.cre_policy(),
            region: self.region_rule(),
            steering: self.simulation.steering,
            master_seed: self.simulation.seed,
            gamma_db: self.gamma_grid(),
            load: self.simulation.load_model,
        }
    }
}

/// A rectangular numeric table that renders as CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// Header plus one line per row, `,`-separated, `\n`-terminated. Numbers
    /// use Rust's shortest round-trip formatting, which is locale-free.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// CRE bias of `params` plus the ζ and τ behind it.
pub fn cre_for(params: &NetworkParams, quad: &QuadratureSpec, cre: &CreSection) -> Result<CrePolicy> {
    policy_on(&Analysis::new(*params, *quad)?, cre)
}

fn policy_on(analysis: &Analysis, cre: &CreSection) -> Result<CrePolicy> {
    let mut policy = CrePolicy::from_network(analysis, cre.beta0, cre.growth)?;
    if let Some(b) = cre.fixed_bias {
        policy.beta = b;
    }
    Ok(policy)
}

/// Analytic and empirical metrics under CRE and MAP on one set of drops.
#[derive(Debug, Clone)]
pub struct PolicyComparison {
    pub policy: CrePolicy,
    pub analytic_cre: MetricSet,
    pub analytic_map: MetricSet,
    pub empirical_cre: MetricSet,
    pub empirical_map: MetricSet,
    pub batch: TrialBatch,
}

pub fn compare_policies(cfg: &ExperimentConfig) -> Result<PolicyComparison> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let analysis = Analysis::new(params, quad)?;
    let policy = policy_on(&analysis, &cfg.cre)?;
    let grid = cfg.gamma_grid();
    let load = cfg.simulation.load_model;
    let batch = run_trials(&params, &cfg.sim_config())?;
    Ok(PolicyComparison {
        analytic_cre: analysis.metrics(policy.beta, &grid, load)?,
        analytic_map: analysis.metrics(1.0, &grid, load)?,
        empirical_cre: batch.metrics(&params, policy.beta, &grid, load),
        empirical_map: batch.metrics(&params, 1.0, &grid, load),
        policy,
        batch,
    })
}

/// Coverage versus threshold: analytic CRE, analytic CRE with the uniform
/// elevation gain law, and empirical CRE and MAP.
pub fn coverage_sweep(cfg: &ExperimentConfig) -> Result<Table> {
    let cmp = compare_policies(cfg)?;
    let quad = cfg.quadrature_spec()?;
    let simplified = cfg.network_params()?.with_elevation(ElevationModel::Uniform);
    let simple_policy = cre_for(&simplified, &quad, &cfg.cre)?;
    let simple = Analysis::new(simplified, quad)?.metrics(
        simple_policy.beta,
        &cfg.gamma_grid(),
        cfg.simulation.load_model,
    )?;
    let mut t = Table::new(&[
        "gamma_dB",
        "analytic_cre",
        "analytic_simplified_gain",
        "empirical_cre",
        "empirical_map",
    ]);
    for i in 0..cmp.analytic_cre.coverage.len() {
        t.rows.push(vec![
            cmp.analytic_cre.coverage[i].0,
            cmp.analytic_cre.coverage[i].1,
            simple.coverage[i].1,
            cmp.empirical_cre.coverage[i].1,
            cmp.empirical_map.coverage[i].1,
        ]);
    }
    Ok(t)
}

/// One point of the density-ratio sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub ratio: f64,
    pub beta: f64,
    pub tau: f64,
    pub rate_cre: f64,
    pub rate_map: f64,
    pub empirical_rate_cre: f64,
    pub empirical_rate_map: f64,
}

/// Network with the mmWave density set to `ratio × λ_lf`.
pub fn params_at_ratio(params: &NetworkParams, ratio: f64) -> NetworkParams {
    let mut p = *params;
    p.mm.density = ratio * p.lf.density;
    p
}

/// Analytic rates for CRE (β recomputed at each ratio) and MAP.
pub fn rate_point_analytic(
    params: &NetworkParams,
    quad: &QuadratureSpec,
    cre: &CreSection,
    ratio: f64,
    load: LoadModel,
) -> Result<RatePoint> {
    let p = params_at_ratio(params, ratio);
    let analysis = Analysis::new(p, *quad)?;
    let policy = policy_on(&analysis, cre)?;
    Ok(RatePoint {
        ratio,
        beta: policy.beta,
        tau: policy.tau,
        rate_cre: analysis.per_user_rate(policy.beta, load)?,
        rate_map: analysis.per_user_rate(1.0, load)?,
        empirical_rate_cre: f64::NAN,
        empirical_rate_map: f64::NAN,
    })
}

pub fn rate_vs_density(cfg: &ExperimentConfig) -> Result<(Vec<RatePoint>, Table)> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let load = cfg.simulation.load_model;
    let mut points = Vec::new();
    let mut t = Table::new(&[
        "density_ratio",
        "beta",
        "tau",
        "rate_cre",
        "rate_map",
        "empirical_rate_cre",
        "empirical_rate_map",
    ]);
    for &ratio in &cfg.sweep.density_ratios {
        let mut pt = rate_point_analytic(&params, &quad, &cfg.cre, ratio, load)?;
        let p = params_at_ratio(&params, ratio);
        let batch = run_trials(&p, &cfg.sim_config())?;
        pt.empirical_rate_cre = batch.metrics(&p, pt.beta, &[], load).rate_per_user;
        pt.empirical_rate_map = batch.metrics(&p, 1.0, &[], load).rate_per_user;
        t.rows.push(vec![
            pt.ratio,
            pt.beta,
            pt.tau,
            pt.rate_cre,
            pt.rate_map,
            pt.empirical_rate_cre,
            pt.empirical_rate_map,
        ]);
        points.push(pt);
    }
    Ok((points, t))
}

/// One point of the array-size sweep. SE here is the association-weighted
/// network SE `A_m SE_m + A_lf SE_lf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SePoint {
    pub antennas: u32,
    pub beta: f64,
    pub se_cre: f64,
    pub se_map: f64,
    pub empirical_se_cre: f64,
    pub empirical_se_map: f64,
}

pub fn se_point_analytic(
    params: &NetworkParams,
    quad: &QuadratureSpec,
    cre: &CreSection,
    antennas: u32,
) -> Result<SePoint> {
    let p = params.with_antennas(antennas)?;
    let analysis = Analysis::new(p, *quad)?;
    let policy = policy_on(&analysis, cre)?;
    let cre_m = analysis.metrics(policy.beta, &[], LoadModel::Unit)?;
    let map_m = analysis.metrics(1.0, &[], LoadModel::Unit)?;
    Ok(SePoint {
        antennas,
        beta: policy.beta,
        se_cre: cre_m.se_total,
        se_map: map_m.se_total,
        empirical_se_cre: f64::NAN,
        empirical_se_map: f64::NAN,
    })
}

pub fn se_vs_antennas(cfg: &ExperimentConfig) -> Result<(Vec<SePoint>, Table)> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let mut points = Vec::new();
    let mut t = Table::new(&[
        "N",
        "beta",
        "se_cre",
        "se_map",
        "empirical_se_cre",
        "empirical_se_map",
    ]);
    for &n in &cfg.sweep.antennas {
        let mut pt = se_point_analytic(&params, &quad, &cfg.cre, n)?;
        let p = params.with_antennas(n)?;
        let batch = run_trials(&p, &cfg.sim_config())?;
        pt.empirical_se_cre = batch.metrics(&p, pt.beta, &[], LoadModel::Unit).se_total;
        pt.empirical_se_map = batch.metrics(&p, 1.0, &[], LoadModel::Unit).se_total;
        t.rows.push(vec![
            n as f64,
            pt.beta,
            pt.se_cre,
            pt.se_map,
            pt.empirical_se_cre,
            pt.empirical_se_map,
        ]);
        points.push(pt);
    }
    Ok((points, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_profile_matches_reference_network() {
        let cfg = ExperimentConfig::default();
        let p = cfg.network_params().unwrap();
        let reference = NetworkParams::reference_profile();
        assert_eq!(p.pattern, reference.pattern);
        assert_eq!(p.height, reference.height);
        assert_eq!(p.lf.fading, reference.lf.fading);
        assert_eq!(p.mm.fading, reference.mm.fading);
        for (a, b) in [(p.lf, reference.lf), (p.mm, reference.mm)] {
            for (x, y) in [
                (a.carrier_hz, b.carrier_hz),
                (a.tx_power_w, b.tx_power_w),
                (a.bandwidth_hz, b.bandwidth_hz),
                (a.noise_w, b.noise_w),
                (a.density, b.density),
                (a.pathloss_exp, b.pathloss_exp),
            ] {
                approx::assert_relative_eq!(x, y, max_relative = 1e-12);
            }
        }
        assert_eq!(cfg.gamma_grid().len(), 31);
    }

    #[test]
    fn unknown_keys_are_rejected_with_location() {
        let text = DEFAULT_CONFIG.replace("[cre]", "[cre]\nbogus = 1");
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn negative_density_is_a_config_error() {
        let text = DEFAULT_CONFIG.replace("density_per_km2 = 500.0", "density_per_km2 = -500.0");
        assert_ne!(text, DEFAULT_CONFIG);
        let err = ExperimentConfig::from_toml_str(&text).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("mmwave"), "{err}");
    }

    #[test]
    fn non_square_antenna_sweep_rejected() {
        let text = DEFAULT_CONFIG.replace("antennas = [16, 64, 256]", "antennas = [16, 60]");
        assert_ne!(text, DEFAULT_CONFIG);
        assert!(ExperimentConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b"]);
        t.rows.push(vec![1.0, 0.25]);
        t.rows.push(vec![-10.0, 1e-7]);
        assert_eq!(t.to_csv(), "a,b\n1,0.25\n-10,0.0000001\n");
        assert_eq!(t.column("b").unwrap(), vec![0.25, 1e-7]);
        assert!(t.column("c").is_none());
    }
}
