//! Oracle checks shared by the `validate` command and the test suites.
//!
//! Statistical tolerances are quoted at a reference sample size and widen as
//! `√(n_ref / n)` when fewer samples are used.

use serde::Serialize;

use crate::analysis::Analysis;
use crate::antenna::ElevationModel;
use crate::association::bias_factor;
use crate::error::Result;
use crate::experiments::{
    compare_policies, rate_point_analytic, se_point_analytic, ExperimentConfig, PolicyComparison,
};
use crate::geometry::{ks_statistic, ServingDistanceDist};
use crate::params::{db_to_linear, Band, Fading, NetworkParams};
use crate::quadrature::QuadratureSpec;
use crate::simulator::{empirical_laplace, main_lobe_hit_frequency, run_trials, GainMode, RegionRule};

/// One pass/fail comparison with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub reference: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Informational checks are reported but do not fail a run.
    pub gating: bool,
}

impl Check {
    fn abs(name: impl Into<String>, measured: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            reference,
            tolerance,
            passed: (measured - reference).abs() <= tolerance,
            gating: true,
        }
    }

    fn rel(name: impl Into<String>, measured: f64, reference: f64, tolerance: f64) -> Self {
        let err = ((measured - reference) / reference).abs();
        Self {
            name: name.into(),
            measured,
            reference,
            tolerance,
            passed: err <= tolerance,
            gating: true,
        }
    }

    fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            reference: bound,
            tolerance: 0.0,
            passed: measured < bound,
            gating: true,
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            measured: ok as u8 as f64,
            reference: 1.0,
            tolerance: 0.0,
            passed: ok,
            gating: true,
        }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.gating).all(|c| c.passed)
    }
}

/// `tol · max(1, √(n_ref / n))`.
pub fn widen(tol: f64, n_ref: usize, n: usize) -> f64 {
    tol * (n_ref as f64 / n.max(1) as f64).sqrt().max(1.0)
}

/// Sample sizes for the statistical checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleSizes {
    pub trials: usize,
    pub laplace: usize,
    pub ks: usize,
    pub hits: usize,
}

impl SampleSizes {
    pub const REFERENCE: SampleSizes = SampleSizes {
        trials: 10_000,
        laplace: 100_000,
        ks: 100_000,
        hits: 20_000_000,
    };

    /// Everything scaled with the drop count.
    pub fn from_trials(trials: usize) -> Self {
        let t = trials.max(1);
        Self {
            trials: t,
            laplace: 10 * t,
            ks: 10 * t,
            hits: 2000 * t,
        }
    }
}

/// Empirical coverage at 0 dB under CRE (`0.90 ± 0.05`) and MAP (`0.65 ± 0.05`).
pub fn policy_coverage_checks(cmp: &PolicyComparison, n: usize) -> Vec<Check> {
    let tol = widen(0.05, SampleSizes::REFERENCE.trials, n);
    let cre = cmp.empirical_cre.coverage_at(0.0).unwrap_or(f64::NAN);
    let map = cmp.empirical_map.coverage_at(0.0).unwrap_or(f64::NAN);
    vec![
        Check::abs("empirical CRE coverage at 0 dB", cre, 0.90, tol),
        Check::abs("empirical MAP coverage at 0 dB", map, 0.65, tol),
    ]
}

/// Largest analytic-vs-empirical coverage gap over the grid, under CRE.
pub fn coverage_agreement_check(cmp: &PolicyComparison, n: usize) -> Check {
    let gap = cmp
        .analytic_cre
        .coverage
        .iter()
        .zip(&cmp.empirical_cre.coverage)
        .map(|(a, e)| (a.1 - e.1).abs())
        .fold(0.0, f64::max);
    Check::below(
        "max |analytic - empirical| CRE coverage",
        gap,
        widen(0.05, SampleSizes::REFERENCE.trials, n),
    )
}

/// Per-band unconditional quantities against the simulator.
pub fn per_band_checks(params: &NetworkParams, quad: &QuadratureSpec, cmp: &PolicyComparison, n: usize) -> Result<Vec<Check>> {
    let a = Analysis::new(*params, *quad)?;
    let cov_tol = widen(0.02, SampleSizes::REFERENCE.trials, n);
    let se_tol = widen(0.05, SampleSizes::REFERENCE.trials, n);
    let assoc_tol = widen(0.01, 100_000, n);
    let b = &cmp.batch;
    let mut out = vec![
        Check::abs(
            "low-band coverage at 0 dB vs simulation",
            b.band_coverage(Band::LowFrequency, 1.0),
            a.coverage_lf(1.0)?,
            cov_tol,
        ),
        Check::abs(
            "mmWave coverage at 0 dB vs simulation",
            b.band_coverage(Band::MmWave, 1.0),
            a.coverage_mm(1.0)?,
            cov_tol,
        ),
        Check::rel("low-band SE vs simulation", cmp.empirical_cre.se_lf, cmp.analytic_cre.se_lf, se_tol),
        Check::rel("mmWave SE vs simulation", cmp.empirical_cre.se_m, cmp.analytic_cre.se_m, se_tol),
        Check::rel(
            "SE ratio tau vs simulation",
            cmp.empirical_cre.se_m / cmp.empirical_cre.se_lf,
            cmp.policy.tau,
            se_tol,
        ),
        Check::abs(
            "CRE mmWave association vs simulation",
            cmp.empirical_cre.assoc_mm,
            cmp.analytic_cre.assoc_mm,
            assoc_tol,
        ),
        Check::abs(
            "MAP mmWave association vs simulation",
            cmp.empirical_map.assoc_mm,
            cmp.analytic_map.assoc_mm,
            assoc_tol,
        ),
    ];
    let mut dist = b.serving_distances(Band::MmWave);
    let law = params.serving_law(Band::MmWave)?;
    out.push(Check::below(
        "KS of simulated mmWave serving distances",
        ks_statistic(&mut dist, |r| law.cdf(r)),
        widen(0.01, 100_000, n),
    ));
    Ok(out)
}

/// `(s, r)` probe points: serving-distance quantiles with `s` the coverage
/// argument at 0 dB.
pub fn laplace_probes(params: &NetworkParams, band: Band) -> Result<Vec<(f64, f64)>> {
    let cfg = params.band(band);
    let law = params.serving_law(band)?;
    let m = cfg.nakagami_m() as f64;
    let signal = cfg.tx_power_w * params.serving_gain(band) * cfg.pathloss_const();
    let mut radii: Vec<f64> = [0.1, 0.3, 0.5, 0.7, 0.9].iter().map(|&q| law.quantile(q)).collect();
    if band == Band::MmWave {
        radii[0] = 1.1 * params.height;
    }
    Ok(radii
        .into_iter()
        .map(|r| {
            let shape = if band == Band::MmWave { m } else { 1.0 };
            (shape * r.powf(cfg.pathloss_exp) / signal, r)
        })
        .collect())
}

/// Analytic Laplace transforms against Monte Carlo at five probes per band.
pub fn laplace_checks(params: &NetworkParams, quad: &QuadratureSpec, n: usize, seed: u64) -> Result<Vec<Check>> {
    let a = Analysis::new(*params, *quad)?;
    let region = RegionRule::Auto.resolve(params)?;
    let tol = widen(0.02, SampleSizes::REFERENCE.laplace, n);
    let mut out = Vec::new();
    for band in [Band::LowFrequency, Band::MmWave] {
        for (i, (s, r)) in laplace_probes(params, band)?.into_iter().enumerate() {
            let analytic = match band {
                Band::LowFrequency => a.laplace_lf(s, r)?,
                Band::MmWave => a.laplace_mm(s, r)?,
            };
            let mc = empirical_laplace(params, band, s, r, n, seed.wrapping_add(i as u64), &region)?;
            out.push(Check::rel(
                format!("{} Laplace transform at r = {r:.1} m", band_name(band)),
                mc.mean,
                analytic,
                tol,
            ));
        }
    }
    Ok(out)
}

fn band_name(band: Band) -> &'static str {
    match band {
        Band::LowFrequency => "low-band",
        Band::MmWave => "mmWave",
    }
}

/// `(λ, h)` triples for the serving-distance sampler check.
pub const KS_CONFIGS: [(f64, f64); 3] = [(5e-4, 50.0), (1e-5, 50.0), (1e-4, 120.0)];

pub fn serving_distance_checks(n: usize, seed: u64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (i, &(lam, h)) in KS_CONFIGS.iter().enumerate() {
        let law = ServingDistanceDist::new(lam, h)?;
        let mut rng = crate::simulator::trial_rng(seed, i as u64);
        let mut samples: Vec<f64> = (0..n).map(|_| law.sample(&mut rng)).collect();
        let ks = ks_statistic(&mut samples, |r| law.cdf(r));
        out.push(Check::below(
            format!("serving-distance KS, lambda = {lam:e}/m^2, h = {h} m"),
            ks,
            widen(0.01, SampleSizes::REFERENCE.ks, n),
        ));
    }
    Ok(out)
}

/// Probe distances `d/h` for the main-lobe frequency check.
pub const HIT_GRID: [f64; 6] = [1.05, 1.2, 1.4, 1.6, 1.8, 2.0];

/// Simulated main-lobe frequency against the two-point law, per elevation
/// model. With `gate_mean_value = false` the mean-value comparison is only
/// reported.
pub fn gain_fidelity_checks(params: &NetworkParams, n: usize, seed: u64, gate_mean_value: bool) -> Result<Vec<Check>> {
    let tol = widen(0.20, SampleSizes::REFERENCE.hits, n);
    let mean_value = params.with_elevation(ElevationModel::MeanValue).gain_model();
    let exact = params.with_elevation(ElevationModel::CdfDifference).gain_model();
    let mut out = Vec::new();
    for (i, &k) in HIT_GRID.iter().enumerate() {
        let d = k * params.height;
        let hit = main_lobe_hit_frequency(params, d, n, seed.wrapping_add(i as u64))?.mean;
        let mv = Check::rel(format!("main-lobe frequency vs mean-value law at d = {k}h"), hit, mean_value.p_main(d), tol);
        out.push(if gate_mean_value { mv } else { mv.informational() });
        out.push(Check::rel(
            format!("main-lobe frequency vs CDF-difference law at d = {k}h"),
            hit,
            exact.p_main(d),
            tol,
        ));
    }
    Ok(out)
}

/// Geometric and sampled interferer gains give CRE coverage curves within
/// 0.05 of each other.
pub fn gain_mode_check(cfg: &ExperimentConfig, n: usize) -> Result<Check> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let beta = crate::experiments::cre_for(&params, &quad, &cfg.cre)?.beta;
    let grid = cfg.gamma_grid();
    let mut curves = Vec::new();
    for mode in [GainMode::Geometric, GainMode::Approximate] {
        let mut sim = cfg.sim_config();
        sim.gain_mode = mode;
        sim.n_trials = n;
        let batch = run_trials(&params, &sim)?;
        curves.push(batch.metrics(&params, beta, &grid, cfg.simulation.load_model).coverage);
    }
    let gap = curves[0]
        .iter()
        .zip(&curves[1])
        .map(|(a, b)| (a.1 - b.1).abs())
        .fold(0.0, f64::max);
    Ok(Check::below(
        "max coverage gap, geometric vs sampled gains",
        gap,
        widen(0.05, SampleSizes::REFERENCE.trials, n),
    ))
}

/// The Nakagami series with `m = 1` against the Rayleigh-form integral.
pub fn rayleigh_reduction_checks(params: &NetworkParams, quad: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut p = *params;
    p.mm.fading = Fading::Rayleigh;
    let a = Analysis::new(p, *quad)?;
    let mut out = Vec::new();
    for i in 0..10 {
        let db = -10.0 + i as f64 * 30.0 / 9.0;
        let g = db_to_linear(db);
        out.push(Check::abs(
            format!("m = 1 series vs Rayleigh form at {db:.2} dB"),
            a.coverage_mm(g)?,
            a.coverage_mm_rayleigh(g)?,
            1e-6,
        ));
    }
    Ok(out)
}

/// Probe radii for the derivative check.
pub const DERIVATIVE_RADII: [f64; 5] = [55.0, 60.0, 70.0, 90.0, 120.0];

/// Bell-polynomial derivatives (orders 1 and 2, `m = 3`) against central
/// differences of the transform.
pub fn derivative_checks(params: &NetworkParams, quad: &QuadratureSpec) -> Result<Vec<Check>> {
    let mut p = *params;
    p.mm.fading = Fading::Nakagami(3);
    let a = Analysis::new(p, *quad)?;
    // The difference quotients need the transform far below their step error.
    let tight = Analysis::new(p, QuadratureSpec::new(1e-12, 1e-300, 20_000)?)?;
    let cfg = p.mm;
    let signal = cfg.tx_power_w * p.pattern.gain_main * cfg.pathloss_const();
    let eps = f64::EPSILON;
    let mut out = Vec::new();
    for r in DERIVATIVE_RADII {
        let s = 3.0 * r.powf(cfg.pathloss_exp) / signal;
        let d = a.laplace_mm_derivatives(2, s, r)?;
        let l = |x: f64| tight.laplace_mm(x, r);
        let h1 = s * eps.cbrt();
        let fd1 = (l(s + h1)? - l(s - h1)?) / (2.0 * h1);
        let h2 = s * eps.powf(0.25);
        let fd2 = (l(s + h2)? - 2.0 * l(s)? + l(s - h2)?) / (h2 * h2);
        out.push(Check::rel(format!("first derivative at r = {r} m"), d[1], fd1, 1e-4));
        out.push(Check::rel(format!("second derivative at r = {r} m"), d[2], fd2, 1e-4));
    }
    Ok(out)
}

/// `β(1) = ζ`, `β(∞) = ζβ₀` and strict growth on a 100-point `τ` grid.
pub fn bias_factor_checks(beta0: f64, growth: f64, zeta: f64) -> Result<Vec<Check>> {
    let at_one = bias_factor(beta0, growth, zeta, 1.0)?;
    let far = bias_factor(beta0, growth, zeta, 1e6)?;
    // Past τ ≈ 1 + 30/α the increments fall below one ulp, so the grid stops
    // where growth is still representable.
    let top = 1.0 + 6.0 / growth;
    let betas: Vec<f64> = (0..100)
        .map(|i| bias_factor(beta0, growth, zeta, top * i as f64 / 99.0))
        .collect::<Result<_>>()?;
    let increasing = betas.windows(2).all(|w| w[1] > w[0]);
    Ok(vec![
        Check::abs("beta(tau = 1) = zeta", at_one, zeta, 1e-9 * zeta.max(1.0)),
        Check::abs("beta(tau -> inf) = zeta * beta0", far, zeta * beta0, 1e-9 * (zeta * beta0).max(1.0)),
        Check::holds("beta strictly increasing on a 100-point tau grid", increasing),
    ])
}

/// Analytic rate sweep: CRE ≥ MAP everywhere, and a smaller CRE advantage at
/// ratio 100 than at 25.
pub fn rate_trend_checks(cfg: &ExperimentConfig, ratios: &[f64]) -> Result<Vec<Check>> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let mut out = Vec::new();
    let mut gaps = Vec::new();
    for &ratio in ratios {
        let pt = rate_point_analytic(&params, &quad, &cfg.cre, ratio, cfg.simulation.load_model)?;
        gaps.push((ratio, pt.rate_cre - pt.rate_map));
        out.push(Check::holds(format!("CRE rate >= MAP rate at ratio {ratio}"), pt.rate_cre >= pt.rate_map));
    }
    let gap_at = |x: f64| gaps.iter().find(|(r, _)| *r == x).map(|(_, g)| *g);
    if let (Some(g25), Some(g100)) = (gap_at(25.0), gap_at(100.0)) {
        let mut c = Check::holds("CRE advantage at ratio 100 below that at ratio 25", g100 < g25);
        c.measured = g100;
        c.reference = g25;
        out.push(c);
    }
    Ok(out)
}

/// SE non-decreasing in `N` for both policies; CRE–MAP gap not wider at the
/// largest array than at the smallest.
pub fn se_trend_checks(cfg: &ExperimentConfig, antennas: &[u32]) -> Result<Vec<Check>> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let pts = antennas
        .iter()
        .map(|&n| se_point_analytic(&params, &quad, &cfg.cre, n))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![
        Check::holds("CRE SE non-decreasing in N", pts.windows(2).all(|w| w[1].se_cre >= w[0].se_cre)),
        Check::holds("MAP SE non-decreasing in N", pts.windows(2).all(|w| w[1].se_map >= w[0].se_map)),
    ];
    if let (Some(first), Some(last)) = (pts.first(), pts.last()) {
        let g0 = first.se_cre - first.se_map;
        let g1 = last.se_cre - last.se_map;
        let mut c = Check::holds("CRE-MAP SE gap at largest N no wider than at smallest", g1 <= g0);
        c.measured = g1;
        c.reference = g0;
        out.push(c);
    }
    Ok(out)
}

/// Everything, as run by `uavcre validate`.
pub fn full_report(cfg: &ExperimentConfig) -> Result<Report> {
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    let sizes = SampleSizes::from_trials(cfg.simulation.trials);
    let seed = cfg.simulation.seed;
    let cmp = compare_policies(cfg)?;
    let mut checks = policy_coverage_checks(&cmp, sizes.trials);
    checks.push(coverage_agreement_check(&cmp, sizes.trials));
    checks.extend(per_band_checks(&params, &quad, &cmp, sizes.trials)?);
    checks.extend(laplace_checks(&params, &quad, sizes.laplace, seed)?);
    checks.extend(serving_distance_checks(sizes.ks, seed)?);
    checks.extend(gain_fidelity_checks(&params, sizes.hits, seed, false)?);
    checks.push(gain_mode_check(cfg, sizes.trials)?);
    checks.extend(rayleigh_reduction_checks(&params, &quad)?);
    checks.extend(derivative_checks(&params, &quad)?);
    checks.extend(bias_factor_checks(cfg.cre.beta0, cfg.cre.growth, cmp.policy.zeta)?);
    checks.extend(rate_trend_checks(cfg, &cfg.sweep.density_ratios)?);
    checks.extend(se_trend_checks(cfg, &cfg.sweep.antennas)?);
    Ok(Report { checks })
}
