//! Monte Carlo drops of the two-tier network seen from a typical user at the
//! origin.
//!
//! Each trial samples both UAV tiers on per-band disks, draws fading and
//! interferer gains, and records the SINR each band would deliver. Policies
//! are applied afterwards, so CRE and MAP are compared on the same drops.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::{Distribution, Exp1, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{Analysis, LoadModel, MetricSet, Provenance};
use crate::antenna::{in_main_lobe, GainModel};
use crate::association::{prefer, CrePolicy};
use crate::error::{Error, Result};
use crate::geometry::{sample_disk, slant_distance, Point2, ServingDistanceDist};
use crate::params::{db_to_linear, Band, NetworkParams};
use crate::quadrature::QuadratureSpec;

/// How interfering mmWave UAVs' gains toward the typical user are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GainMode {
    /// Sector test against each UAV's actual steering direction.
    #[default]
    Geometric,
    /// Draw from the two-point law at the interferer's slant distance.
    Approximate,
}

/// How each mmWave UAV picks the user its beam points at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Steering {
    /// Serving distance drawn from the nearest-UAV law at a uniform azimuth.
    #[default]
    Surrogate,
    /// Drop the user PPP, attach users to their nearest mmWave UAV and steer
    /// at one attached user chosen uniformly. Much slower.
    ExactUsers,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    Cre { beta0: f64, growth: f64 },
    Map,
    FixedBias(f64),
}

impl Policy {
    /// The bias this policy applies to the mmWave average received power.
    pub fn beta(&self, analysis: &Analysis) -> Result<f64> {
        match *self {
            Policy::Cre { beta0, growth } => Ok(CrePolicy::from_network(analysis, beta0, growth)?.beta),
            Policy::Map => Ok(1.0),
            Policy::FixedBias(b) => {
                if b.is_nan() || b <= 0.0 {
                    return Err(Error::param("beta", format!("must be > 0, got {b}")));
                }
                Ok(b)
            }
        }
    }
}

/// Radius of the sampled disk for each band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionRule {
    /// Per band, the larger of the radius with void probability below 1e-9
    /// and the radius whose out-of-disk interference has standard deviation
    /// below 1e-3 of the mean interference from beyond the median serving
    /// distance. The out-of-disk mean is added back deterministically.
    Auto,
    /// Same planar radius for both bands, meters.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimRegion {
    pub radius_lf: f64,
    pub radius_mm: f64,
}

impl SimRegion {
    pub fn radius(&self, band: Band) -> f64 {
        match band {
            Band::LowFrequency => self.radius_lf,
            Band::MmWave => self.radius_mm,
        }
    }
}

const VOID_PROBABILITY: f64 = 1e-9;
const TAIL_STD_FRACTION: f64 = 1e-3;

impl RegionRule {
    pub fn resolve(&self, params: &NetworkParams) -> Result<SimRegion> {
        match *self {
            RegionRule::Fixed(r) => {
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::param("region_radius", format!("must be > 0, got {r}")));
                }
                Ok(SimRegion {
                    radius_lf: r,
                    radius_mm: r,
                })
            }
            RegionRule::Auto => Ok(SimRegion {
                radius_lf: auto_radius(params, Band::LowFrequency),
                radius_mm: auto_radius(params, Band::MmWave),
            }),
        }
    }
}

/// Mean and second moment of the transmit gain toward the origin of a UAV
/// at slant distance `d`.
fn gain_moments(params: &NetworkParams, band: Band, d: f64) -> (f64, f64) {
    match band {
        Band::LowFrequency => (1.0, 1.0),
        Band::MmWave => {
            let dist = params.gain_model().dist(d);
            let second = dist.atoms().iter().map(|(g, p)| g * g * p).sum();
            (dist.mean_gain(), second)
        }
    }
}

/// Mean interference at the origin from UAVs beyond planar radius `radius`.
pub fn tail_interference_mean(params: &NetworkParams, band: Band, radius: f64) -> f64 {
    let cfg = params.band(band);
    let a = cfg.pathloss_exp;
    let d = slant_distance(radius, params.height);
    let (mean_gain, _) = gain_moments(params, band, d);
    2.0 * PI * cfg.density * cfg.tx_power_w * cfg.pathloss_const() * mean_gain * d.powf(2.0 - a)
        / (a - 2.0)
}

/// Standard deviation of the interference from beyond planar radius `radius`.
pub fn tail_interference_std(params: &NetworkParams, band: Band, radius: f64) -> f64 {
    let cfg = params.band(band);
    let a = cfg.pathloss_exp;
    let d = slant_distance(radius, params.height);
    let (_, second_gain) = gain_moments(params, band, d);
    let m = cfg.nakagami_m() as f64;
    let fading_second = 1.0 + 1.0 / m;
    let pk = cfg.tx_power_w * cfg.pathloss_const();
    let var = PI * cfg.density * fading_second * second_gain * pk * pk * d.powf(2.0 - 2.0 * a)
        / (a - 1.0);
    var.sqrt()
}

fn auto_radius(params: &NetworkParams, band: Band) -> f64 {
    let cfg = params.band(band);
    let void = ((1.0 / VOID_PROBABILITY).ln() / (PI * cfg.density)).sqrt();
    let law = ServingDistanceDist::new(cfg.density, params.height).expect("validated params");
    let median = law.quantile(0.5);
    let median_planar = (median * median - params.height * params.height).max(0.0).sqrt();
    let reference = tail_interference_mean(params, band, median_planar);
    let target = TAIL_STD_FRACTION * reference;
    // The tail std decreases in the radius: double then bisect.
    let mut hi = void.max(1.0);
    while tail_interference_std(params, band, hi) > target {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tail_interference_std(params, band, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi.max(void)
}

/// Monte Carlo configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n_trials: usize,
    pub gain_mode: GainMode,
    pub policy: Policy,
    pub region: RegionRule,
    pub steering: Steering,
    pub master_seed: u64,
    /// Coverage thresholds, dB.
    pub gamma_db: Vec<f64>,
    pub load: LoadModel,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_trials: 10_000,
            gain_mode: GainMode::Geometric,
            policy: Policy::Cre {
                beta0: 5.0,
                growth: 5.0,
            },
            region: RegionRule::Auto,
            steering: Steering::Surrogate,
            master_seed: 1,
            gamma_db: crate::analysis::db_grid(-10.0, 20.0, 1.0),
            load: LoadModel::Unit,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::param("n_trials", "must be at least 1"));
        }
        if let RegionRule::Fixed(_) = self.region {
            self.region.resolve(&NetworkParams::reference_profile())?;
        }
        Ok(())
    }
}

/// Independent random stream for trial `trial` under `master_seed`.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// One sampled drop of both UAV tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub uavs_lf: Vec<Point2>,
    pub uavs_mm: Vec<Point2>,
    /// Ground point each mmWave UAV steers its main lobe at.
    pub steer_targets: Vec<Point2>,
    pub trial_seed: u64,
    /// Draws discarded because a band came out empty.
    pub redraws: u32,
}

const MAX_REDRAWS: u32 = 1000;

/// Drops both tiers on their disks, redrawing when a band is empty.
pub fn drop_network<R: Rng + ?Sized>(
    params: &NetworkParams,
    region: &SimRegion,
    steering: Steering,
    trial_seed: u64,
    rng: &mut R,
) -> Result<NetworkRealization> {
    if !(region.radius_lf > 0.0 && region.radius_mm > 0.0) {
        return Err(Error::param("region_radius", "the sampling disk has zero area"));
    }
    let mut redraws = 0;
    loop {
        let uavs_lf = sample_disk(params.lf.density, 0.0, region.radius_lf, rng);
        let uavs_mm = sample_disk(params.mm.density, 0.0, region.radius_mm, rng);
        if uavs_lf.is_empty() || uavs_mm.is_empty() {
            redraws += 1;
            if redraws >= MAX_REDRAWS {
                return Err(Error::Config(format!(
                    "{redraws} consecutive drops left a band empty; enlarge the region"
                )));
            }
            continue;
        }
        let steer_targets = match steering {
            Steering::Surrogate => surrogate_targets(params, &uavs_mm, rng),
            Steering::ExactUsers => user_targets(params, region.radius_mm, &uavs_mm, rng),
        };
        return Ok(NetworkRealization {
            uavs_lf,
            uavs_mm,
            steer_targets,
            trial_seed,
            redraws,
        });
    }
}

/// Deterministic drop for `(master_seed, trial)`.
pub fn drop_network_seeded(
    params: &NetworkParams,
    region: &SimRegion,
    steering: Steering,
    master_seed: u64,
    trial: u64,
) -> Result<NetworkRealization> {
    let mut rng = trial_rng(master_seed, trial);
    drop_network(params, region, steering, trial, &mut rng)
}

fn surrogate_targets<R: Rng + ?Sized>(params: &NetworkParams, uavs: &[Point2], rng: &mut R) -> Vec<Point2> {
    let law = ServingDistanceDist::new(params.mm.density, params.height).expect("validated params");
    let h2 = params.height * params.height;
    uavs.iter()
        .map(|&u| {
            let r = law.sample(rng);
            let planar = (r * r - h2).max(0.0).sqrt();
            u + Point2::from_polar(planar, 2.0 * PI * rng.gen::<f64>())
        })
        .collect()
}

/// Uniform grid over UAV positions for nearest-neighbour queries.
struct UavGrid<'a> {
    points: &'a [Point2],
    cell: f64,
    origin: f64,
    side: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> UavGrid<'a> {
    fn new(points: &'a [Point2], radius: f64, density: f64) -> Self {
        let cell = (1.0 / density).sqrt().max(1e-3);
        let side = ((2.0 * radius / cell).ceil() as usize).clamp(1, 4096);
        let cell = 2.0 * radius / side as f64;
        let mut buckets = vec![Vec::new(); side * side];
        let origin = -radius;
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = Self::index(origin, cell, side, *p);
            buckets[cy * side + cx].push(i as u32);
        }
        Self {
            points,
            cell,
            origin,
            side,
            buckets,
        }
    }

    fn index(origin: f64, cell: f64, side: usize, p: Point2) -> (usize, usize) {
        let f = |v: f64| (((v - origin) / cell).floor().max(0.0) as usize).min(side - 1);
        (f(p.x), f(p.y))
    }

    fn nearest(&self, q: Point2) -> usize {
        let (cx, cy) = Self::index(self.origin, self.cell, self.side, q);
        let mut best = (f64::INFINITY, usize::MAX);
        let mut ring = 0usize;
        loop {
            let lo_x = cx.saturating_sub(ring);
            let hi_x = (cx + ring).min(self.side - 1);
            let lo_y = cy.saturating_sub(ring);
            let hi_y = (cy + ring).min(self.side - 1);
            for y in lo_y..=hi_y {
                for x in lo_x..=hi_x {
                    let on_ring = x == lo_x || x == hi_x || y == lo_y || y == hi_y;
                    if !on_ring {
                        continue;
                    }
                    for &i in &self.buckets[y * self.side + x] {
                        let d = self.points[i as usize].distance(q);
                        if d < best.0 || (d == best.0 && (i as usize) < best.1) {
                            best = (d, i as usize);
                        }
                    }
                }
            }
            // Anything outside the searched square is at least `ring·cell` away.
            let covered = lo_x == 0 && lo_y == 0 && hi_x == self.side - 1 && hi_y == self.side - 1;
            if best.0 <= ring as f64 * self.cell || covered {
                return best.1;
            }
            ring += 1;
        }
    }
}

fn user_targets<R: Rng + ?Sized>(
    params: &NetworkParams,
    radius: f64,
    uavs: &[Point2],
    rng: &mut R,
) -> Vec<Point2> {
    let users = sample_disk(params.user_density, 0.0, radius, rng);
    let grid = UavGrid::new(uavs, radius, params.mm.density);
    // Reservoir sampling keeps one uniformly chosen attached user per UAV.
    let mut chosen: Vec<Option<Point2>> = vec![None; uavs.len()];
    let mut counts = vec![0u32; uavs.len()];
    for u in users {
        let k = grid.nearest(u);
        counts[k] += 1;
        if rng.gen_range(0..counts[k]) == 0 {
            chosen[k] = Some(u);
        }
    }
    let fallback = surrogate_targets(params, uavs, rng);
    chosen
        .into_iter()
        .zip(fallback)
        .map(|(c, f)| c.unwrap_or(f))
        .collect()
}

/// The link a band would offer the typical user in one drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkSample {
    pub sinr: f64,
    /// Slant distance to the nearest UAV of the band.
    pub distance: f64,
    /// Average received power `P G K d^{−α}` used for association.
    pub mean_power: f64,
}

/// Both bands' links for one drop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialSample {
    pub lf: LinkSample,
    pub mm: LinkSample,
    pub redraws: u32,
}

/// Outcome for one drop under one policy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub band: Band,
    pub sinr: f64,
    pub se_sample: f64,
    pub serving_distance: f64,
}

impl TrialSample {
    pub fn link(&self, band: Band) -> &LinkSample {
        match band {
            Band::LowFrequency => &self.lf,
            Band::MmWave => &self.mm,
        }
    }

    pub fn resolve(&self, beta: f64) -> TrialResult {
        let out = prefer(self.lf.mean_power, self.mm.mean_power, beta, self.lf.distance, self.mm.distance);
        let link = self.link(out.band);
        TrialResult {
            band: out.band,
            sinr: link.sinr,
            se_sample: (1.0 + link.sinr).log2(),
            serving_distance: out.serving_distance,
        }
    }
}

fn nearest_index(distances: &[f64]) -> usize {
    let mut best = 0;
    for (i, &d) in distances.iter().enumerate() {
        if d < distances[best] {
            best = i;
        }
    }
    best
}

fn band_uavs(real: &NetworkRealization, band: Band) -> &[Point2] {
    match band {
        Band::LowFrequency => &real.uavs_lf,
        Band::MmWave => &real.uavs_mm,
    }
}

/// SINR at the origin for explicit per-UAV fading powers and transmit gains.
/// The nearest UAV serves with gain `G_M` (mmWave) or 1 (low band) regardless
/// of `gains`; `tail` is added to the interference.
pub fn sinr_with_draws(
    params: &NetworkParams,
    band: Band,
    real: &NetworkRealization,
    fading: &[f64],
    gains: &[f64],
    tail: f64,
) -> Result<LinkSample> {
    let uavs = band_uavs(real, band);
    if uavs.is_empty() {
        return Err(Error::Degenerate("no UAV of the band in the realization".into()));
    }
    if fading.len() != uavs.len() || gains.len() != uavs.len() {
        return Err(Error::param("draws", "one fading and gain draw per UAV is required"));
    }
    let cfg = params.band(band);
    let h = params.height;
    let distances: Vec<f64> = uavs.iter().map(|p| slant_distance(p.norm(), h)).collect();
    let serving = nearest_index(&distances);
    let pk = cfg.tx_power_w * cfg.pathloss_const();
    let mut interference = tail;
    for (i, &d) in distances.iter().enumerate() {
        if i != serving {
            interference += pk * gains[i] * fading[i] * d.powf(-cfg.pathloss_exp);
        }
    }
    let r = distances[serving];
    let mean_power = params.mean_received_power(band, r);
    Ok(LinkSample {
        sinr: mean_power * fading[serving] / (cfg.noise_w + interference),
        distance: r,
        mean_power,
    })
}

/// Fading power draws for one band: Exp(1) for Rayleigh, Gamma(m, 1/m) otherwise.
fn draw_fading<R: Rng + ?Sized>(params: &NetworkParams, band: Band, n: usize, rng: &mut R) -> Vec<f64> {
    let m = params.band(band).nakagami_m();
    if m == 1 {
        (0..n).map(|_| Exp1.sample(rng)).collect()
    } else {
        let g = Gamma::new(m as f64, 1.0 / m as f64).expect("shape is a positive integer");
        (0..n).map(|_| g.sample(rng)).collect()
    }
}

/// Transmit gain of every mmWave UAV toward the origin.
fn draw_gains<R: Rng + ?Sized>(
    params: &NetworkParams,
    real: &NetworkRealization,
    mode: GainMode,
    model: &GainModel,
    rng: &mut R,
) -> Vec<f64> {
    let pat = &params.pattern;
    match mode {
        GainMode::Geometric => real
            .uavs_mm
            .iter()
            .zip(&real.steer_targets)
            .map(|(&u, &t)| {
                if in_main_lobe(u, params.height, t, Point2::ORIGIN, pat) {
                    pat.gain_main
                } else {
                    pat.gain_side
                }
            })
            .collect(),
        GainMode::Approximate => real
            .uavs_mm
            .iter()
            .map(|u| {
                let d = slant_distance(u.norm(), params.height);
                if rng.gen::<f64>() < model.p_main(d) {
                    pat.gain_main
                } else {
                    pat.gain_side
                }
            })
            .collect(),
    }
}

/// Draws fading (and for mmWave, gains) and evaluates the band's SINR.
pub fn sinr_at_typical<R: Rng + ?Sized>(
    params: &NetworkParams,
    band: Band,
    real: &NetworkRealization,
    gain_mode: GainMode,
    tail: f64,
    rng: &mut R,
) -> Result<LinkSample> {
    let n = band_uavs(real, band).len();
    let fading = draw_fading(params, band, n, rng);
    let gains = match band {
        Band::LowFrequency => vec![1.0; n],
        Band::MmWave => draw_gains(params, real, gain_mode, &params.gain_model(), rng),
    };
    sinr_with_draws(params, band, real, &fading, &gains, tail)
}

/// Every trial of one run, in trial order.
#[derive(Debug, Clone)]
pub struct TrialBatch {
    pub samples: Vec<TrialSample>,
    pub region: SimRegion,
}

impl TrialBatch {
    pub fn redraws(&self) -> u64 {
        self.samples.iter().map(|s| s.redraws as u64).sum()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Empirical metrics when associating with bias `β`.
    pub fn metrics(&self, params: &NetworkParams, beta: f64, gamma_db: &[f64], load: LoadModel) -> MetricSet {
        let n = self.samples.len() as f64;
        let results: Vec<TrialResult> = self.samples.iter().map(|s| s.resolve(beta)).collect();
        let coverage = gamma_db
            .iter()
            .map(|&db| {
                let g = db_to_linear(db);
                let hits = results.iter().filter(|r| r.sinr > g).count();
                (db, hits as f64 / n)
            })
            .collect();
        let mm_count = results.iter().filter(|r| r.band == Band::MmWave).count();
        let a_m = mm_count as f64 / n;
        let mean_se = |band: Band| {
            let (sum, count) = results
                .iter()
                .filter(|r| r.band == band)
                .fold((0.0, 0usize), |(s, c), r| (s + r.se_sample, c + 1));
            if count == 0 {
                0.0
            } else {
                sum / count as f64
            }
        };
        let se_of = |band: Band| self.samples.iter().map(|s| (1.0 + s.link(band).sinr).log2()).sum::<f64>() / n;
        let se_served_m = mean_se(Band::MmWave);
        let se_served_lf = mean_se(Band::LowFrequency);
        let rate = crate::analysis::rate_from_parts(params, a_m, se_served_lf, se_served_m, load);
        MetricSet {
            coverage,
            assoc_mm: a_m,
            se_lf: se_of(Band::LowFrequency),
            se_m: se_of(Band::MmWave),
            se_total: results.iter().map(|r| r.se_sample).sum::<f64>() / n,
            rate_per_user: rate,
            provenance: Provenance::Empirical,
        }
    }

    /// Fraction of drops whose band-`band` SINR exceeds `γ` (linear).
    pub fn band_coverage(&self, band: Band, gamma: f64) -> f64 {
        let hits = self.samples.iter().filter(|s| s.link(band).sinr > gamma).count();
        hits as f64 / self.samples.len() as f64
    }

    pub fn serving_distances(&self, band: Band) -> Vec<f64> {
        self.samples.iter().map(|s| s.link(band).distance).collect()
    }
}

/// Runs `sim.n_trials` independent drops in parallel. The result depends only
/// on `(sim, params)`, not on the worker count.
pub fn run_trials(params: &NetworkParams, sim: &SimConfig) -> Result<TrialBatch> {
    params.validate()?;
    sim.validate()?;
    let region = sim.region.resolve(params)?;
    let tail_lf = tail_interference_mean(params, Band::LowFrequency, region.radius_lf);
    let tail_mm = tail_interference_mean(params, Band::MmWave, region.radius_mm);
    let samples = (0..sim.n_trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = trial_rng(sim.master_seed, trial);
            let real = drop_network(params, &region, sim.steering, trial, &mut rng)?;
            let lf = sinr_at_typical(params, Band::LowFrequency, &real, sim.gain_mode, tail_lf, &mut rng)?;
            let mm = sinr_at_typical(params, Band::MmWave, &real, sim.gain_mode, tail_mm, &mut rng)?;
            Ok(TrialSample {
                lf,
                mm,
                redraws: real.redraws,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if samples.is_empty() {
        return Err(Error::Config("no trial produced a usable drop".into()));
    }
    Ok(TrialBatch { samples, region })
}

/// Empirical metrics under the configured policy.
pub fn run_experiment(params: &NetworkParams, sim: &SimConfig, quad: &QuadratureSpec) -> Result<MetricSet> {
    let analysis = Analysis::new(*params, *quad)?;
    let beta = sim.policy.beta(&analysis)?;
    let batch = run_trials(params, sim)?;
    Ok(batch.metrics(params, beta, &sim.gamma_db, sim.load))
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
}

impl Estimate {
    fn from_sums(sum: f64, sum_sq: f64, n: usize) -> Self {
        let n = n as f64;
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Self {
            mean,
            std_err: (var / n).sqrt(),
        }
    }
}

const CHUNK: usize = 1000;

/// Parallel, order-deterministic sum of `f(rng)` and `f(rng)²` over `n`
/// draws; chunk `c` uses stream `c` of `seed`.
fn chunked_mean<F>(n: usize, seed: u64, f: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = trial_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..len {
                let v = f(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Estimate::from_sums(s, s2, n)
}

/// Monte Carlo `E[exp(−s I) | r]`: interferers form a PPP beyond slant
/// distance `r` (up to the band's disk), mmWave gains are drawn from the
/// two-point law and fading follows the band's model.
pub fn empirical_laplace(
    params: &NetworkParams,
    band: Band,
    s: f64,
    r: f64,
    n: usize,
    seed: u64,
    region: &SimRegion,
) -> Result<Estimate> {
    if !(r >= params.height) {
        return Err(Error::Domain(format!("exclusion radius {r} is below the UAV height")));
    }
    if n < 2 {
        return Err(Error::param("n", "at least two realizations are needed"));
    }
    let cfg = *params.band(band);
    let h = params.height;
    let inner = (r * r - h * h).max(0.0).sqrt();
    let outer = region.radius(band).max(inner);
    let tail = tail_interference_mean(params, band, outer);
    let model = params.gain_model();
    let pat = params.pattern;
    let pk = cfg.tx_power_w * cfg.pathloss_const();
    let m = cfg.nakagami_m();
    let gamma = Gamma::new(m as f64, 1.0 / m as f64).expect("positive shape");
    Ok(chunked_mean(n, seed, |rng| {
        let pts = sample_disk(cfg.density, inner, outer, rng);
        let mut interference = tail;
        for p in pts {
            let d = slant_distance(p.norm(), h);
            let fade: f64 = if m == 1 { Exp1.sample(rng) } else { gamma.sample(rng) };
            let g = match band {
                Band::LowFrequency => 1.0,
                Band::MmWave => {
                    if rng.gen::<f64>() < model.p_main(d) {
                        pat.gain_main
                    } else {
                        pat.gain_side
                    }
                }
            };
            interference += pk * g * fade * d.powf(-cfg.pathloss_exp);
        }
        (-s * interference).exp()
    }))
}

/// Fraction of steering draws that put a probe at slant distance `d` inside
/// a UAV's main lobe, with the UAV steering at a surrogate serving user.
pub fn main_lobe_hit_frequency(params: &NetworkParams, d: f64, n: usize, seed: u64) -> Result<Estimate> {
    let h = params.height;
    if !(d >= h) {
        return Err(Error::Domain(format!("probe distance {d} is below the UAV height {h}")));
    }
    let law = ServingDistanceDist::new(params.mm.density, h)?;
    let pat = params.pattern;
    let probe = Point2::new((d * d - h * h).sqrt(), 0.0);
    Ok(chunked_mean(n, seed, |rng| {
        let r = law.sample(rng);
        let planar = (r * r - h * h).max(0.0).sqrt();
        let target = Point2::from_polar(planar, 2.0 * PI * rng.gen::<f64>());
        if in_main_lobe(Point2::ORIGIN, h, target, probe, &pat) {
            1.0
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_region() -> SimRegion {
        SimRegion {
            radius_lf: 3000.0,
            radius_mm: 500.0,
        }
    }

    #[test]
    fn drops_are_deterministic() {
        let p = NetworkParams::reference_profile();
        let a = drop_network_seeded(&p, &small_region(), Steering::Surrogate, 9, 3).unwrap();
        let b = drop_network_seeded(&p, &small_region(), Steering::Surrogate, 9, 3).unwrap();
        assert_eq!(a, b);
        let c = drop_network_seeded(&p, &small_region(), Steering::Surrogate, 9, 4).unwrap();
        assert_ne!(a.uavs_mm, c.uavs_mm);
    }

    #[test]
    fn zero_area_region_is_rejected() {
        assert!(RegionRule::Fixed(0.0).resolve(&NetworkParams::reference_profile()).is_err());
        let p = NetworkParams::reference_profile();
        let bad = SimRegion {
            radius_lf: 0.0,
            radius_mm: 100.0,
        };
        let mut rng = trial_rng(1, 0);
        assert!(drop_network(&p, &bad, Steering::Surrogate, 0, &mut rng).is_err());
    }

    #[test]
    fn every_uav_has_one_target() {
        let p = NetworkParams::reference_profile();
        for steering in [Steering::Surrogate, Steering::ExactUsers] {
            let real = drop_network_seeded(&p, &small_region(), steering, 5, 0).unwrap();
            assert_eq!(real.steer_targets.len(), real.uavs_mm.len());
            assert!(real.uavs_mm.iter().all(|u| u.norm() <= 500.0));
        }
    }

    #[test]
    fn exact_steering_targets_are_attached_users() {
        let p = NetworkParams::reference_profile();
        let real = drop_network_seeded(&p, &small_region(), Steering::ExactUsers, 2, 0).unwrap();
        // Each target must be closer to its own UAV than to any other.
        for (k, t) in real.steer_targets.iter().enumerate().take(200) {
            let own = real.uavs_mm[k].distance(*t);
            let best = real.uavs_mm.iter().map(|u| u.distance(*t)).fold(f64::INFINITY, f64::min);
            assert!(own <= best + 1e-9);
        }
    }

    #[test]
    fn grid_nearest_matches_brute_force() {
        let mut rng = trial_rng(3, 0);
        let pts = sample_disk(5e-4, 0.0, 800.0, &mut rng);
        let grid = UavGrid::new(&pts, 800.0, 5e-4);
        for _ in 0..500 {
            let q = Point2::new(rng.gen_range(-900.0..900.0), rng.gen_range(-900.0..900.0));
            let brute = (0..pts.len())
                .min_by(|&a, &b| pts[a].distance(q).total_cmp(&pts[b].distance(q)))
                .unwrap();
            assert_relative_eq!(pts[grid.nearest(q)].distance(q), pts[brute].distance(q));
        }
    }

    #[test]
    fn single_uav_without_fading_gives_snr() {
        let p = NetworkParams::reference_profile();
        let real = NetworkRealization {
            uavs_lf: vec![Point2::new(30.0, 40.0)],
            uavs_mm: vec![Point2::new(0.0, 20.0)],
            steer_targets: vec![Point2::ORIGIN],
            trial_seed: 0,
            redraws: 0,
        };
        for band in [Band::LowFrequency, Band::MmWave] {
            let cfg = p.band(band);
            let link = sinr_with_draws(&p, band, &real, &[1.0], &[1.0], 0.0).unwrap();
            let d = slant_distance(band_uavs(&real, band)[0].norm(), p.height);
            let expected = cfg.tx_power_w * p.serving_gain(band) * cfg.pathloss_const()
                * d.powf(-cfg.pathloss_exp)
                / cfg.noise_w;
            assert_relative_eq!(link.sinr, expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn an_extra_interferer_lowers_sinr() {
        let p = NetworkParams::reference_profile();
        let mut real = NetworkRealization {
            uavs_lf: vec![Point2::new(10.0, 0.0)],
            uavs_mm: vec![Point2::new(10.0, 0.0)],
            steer_targets: vec![Point2::ORIGIN],
            trial_seed: 0,
            redraws: 0,
        };
        let alone = sinr_with_draws(&p, Band::MmWave, &real, &[0.7], &[1.0], 0.0).unwrap();
        real.uavs_mm.push(Point2::new(-400.0, 90.0));
        real.steer_targets.push(Point2::new(-380.0, 90.0));
        let crowded = sinr_with_draws(&p, Band::MmWave, &real, &[0.7, 2.0], &[1.0, 0.76], 0.0).unwrap();
        assert!(crowded.sinr < alone.sinr);
    }

    #[test]
    fn auto_region_is_large_enough() {
        let p = NetworkParams::reference_profile();
        let reg = RegionRule::Auto.resolve(&p).unwrap();
        for band in [Band::LowFrequency, Band::MmWave] {
            let cfg = p.band(band);
            let r = reg.radius(band);
            assert!((-PI * cfg.density * r * r).exp() < 1e-9);
            let law = p.serving_law(band).unwrap();
            let med = law.quantile(0.5);
            let reference = tail_interference_mean(&p, band, (med * med - 2500.0).sqrt());
            assert!(tail_interference_std(&p, band, r) <= 1.0001e-3 * reference);
        }
    }

    #[test]
    fn batch_is_independent_of_thread_count() {
        let p = NetworkParams::reference_profile();
        let sim = SimConfig {
            n_trials: 64,
            region: RegionRule::Fixed(1500.0),
            master_seed: 11,
            ..Default::default()
        };
        let a = run_trials(&p, &sim).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| run_trials(&p, &sim).unwrap());
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn infinite_bias_sends_everyone_to_mmwave() {
        let p = NetworkParams::reference_profile();
        let sim = SimConfig {
            n_trials: 50,
            region: RegionRule::Fixed(1500.0),
            ..Default::default()
        };
        let batch = run_trials(&p, &sim).unwrap();
        let m = batch.metrics(&p, f64::INFINITY, &[0.0], LoadModel::Unit);
        assert_eq!(m.assoc_mm, 1.0);
    }

    #[test]
    fn zero_trials_rejected() {
        let sim = SimConfig {
            n_trials: 0,
            ..Default::default()
        };
        assert!(run_trials(&NetworkParams::reference_profile(), &sim).is_err());
    }
}
