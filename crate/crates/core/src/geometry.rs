//! Point processes on the ground plane and the law of the serving distance.
//!
//! UAVs hover at a common height `h`; positions are stored as planar
//! coordinates and every distance handed to the radio model is the slant
//! (3D) distance `√(h² + ρ²)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{integrate_semi_infinite_scaled, QuadratureSpec};

/// A point on the ground plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(radius: f64, azimuth: f64) -> Self {
        Self {
            x: radius * azimuth.cos(),
            y: radius * azimuth.sin(),
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

/// Slant distance between a ground point at planar offset `planar` and a UAV
/// at height `height`.
#[inline]
pub fn slant_distance(planar: f64, height: f64) -> f64 {
    (planar * planar + height * height).sqrt()
}

/// Homogeneous Poisson point process restricted to a disk centred on the
/// origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ppp2D {
    density: f64,
    region_radius: f64,
    seed: u64,
}

impl Ppp2D {
    pub fn new(density: f64, region_radius: f64, seed: u64) -> Result<Self> {
        ensure_positive("density", density)?;
        ensure_positive("region_radius", region_radius)?;
        Ok(Self {
            density,
            region_radius,
            seed,
        })
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn region_radius(&self) -> f64 {
        self.region_radius
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn expected_count(&self) -> f64 {
        self.density * PI * self.region_radius * self.region_radius
    }

    /// Draws one realisation from the caller's stream.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Point2> {
        sample_disk(self.density, 0.0, self.region_radius, rng)
    }

    /// Draws one realisation from a stream seeded by the process' own seed.
    pub fn sample_seeded(&self) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.sample(&mut rng)
    }
}

/// PPP of the given density on the annulus `inner ≤ ρ ≤ outer`.
///
/// With `inner = 0` this is the full disk. Points are i.i.d. uniform on the
/// annulus given a Poisson count.
pub fn sample_disk<R: Rng + ?Sized>(
    density: f64,
    inner: f64,
    outer: f64,
    rng: &mut R,
) -> Vec<Point2> {
    debug_assert!(outer >= inner && inner >= 0.0);
    let area = PI * (outer * outer - inner * inner);
    let mean = density * area;
    let count = poisson_count(mean, rng);
    let inner_sq = inner * inner;
    let span = outer * outer - inner_sq;
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen();
            let radius = (inner_sq + u * span).sqrt();
            let azimuth = 2.0 * PI * rng.gen::<f64>();
            Point2::from_polar(radius, azimuth)
        })
        .collect()
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let n: f64 = Poisson::new(mean)
        .expect("mean is positive and finite")
        .sample(rng);
    n as usize
}

/// Law of the slant distance from the typical user to the nearest UAV of a
/// PPP with `density` hovering at `height`:
/// `f(r) = 2πλ r exp(−πλ(r² − h²))` on `r ≥ h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServingDistanceDist {
    density: f64,
    height: f64,
}

impl ServingDistanceDist {
    pub fn new(density: f64, height: f64) -> Result<Self> {
        ensure_positive("density", density)?;
        ensure_positive("height", height)?;
        Ok(Self { density, height })
    }

    pub fn density(&self) -> f64 {
        self.density
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn pdf(&self, r: f64) -> f64 {
        if r < self.height {
            return 0.0;
        }
        let lam = self.density;
        2.0 * PI * lam * r * (-PI * lam * (r * r - self.height * self.height)).exp()
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= self.height {
            return 0.0;
        }
        -(-PI * self.density * (r * r - self.height * self.height)).exp_m1()
    }

    /// `1 − F(r)`, computed without cancellation.
    pub fn survival(&self, r: f64) -> f64 {
        if r <= self.height {
            return 1.0;
        }
        (-PI * self.density * (r * r - self.height * self.height)).exp()
    }

    /// Inverse CDF, `r = √(h² − ln(1−p)/(πλ))`.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        (self.height * self.height - (-p).ln_1p() / (PI * self.density)).sqrt()
    }

    /// Maps `u ∈ (0, 1]` to `√(h² − ln(u)/(πλ))`; `u = 1` gives `h`.
    pub fn from_uniform(&self, u: f64) -> f64 {
        (self.height * self.height - u.ln() / (PI * self.density)).sqrt()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // gen() is on [0, 1); 1 - gen() is on (0, 1].
        let u = 1.0 - rng.gen::<f64>();
        self.from_uniform(u)
    }

    /// Natural length scale of the distribution beyond `h`.
    pub fn scale(&self) -> f64 {
        1.0 / (PI * self.density).sqrt()
    }

    /// `E[R^{−α}]` by quadrature.
    pub fn mean_inverse_pathloss(&self, alpha: f64, spec: &QuadratureSpec) -> Result<f64> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::param("alpha", format!("must be finite and >= 0, got {alpha}")));
        }
        if alpha == 0.0 {
            return Ok(1.0);
        }
        let h = self.height;
        let lam = self.density;
        // Integrate in the offset variable x = r − h so the integrand is
        // resolved near the lower bound even when the law is very tight.
        // (r/h)^{−α} keeps the integrand O(1) so the relative tolerance governs.
        let integrand = |x: f64| {
            let r = h + x;
            2.0 * PI * lam * r * (r / h).powf(-alpha) * (-PI * lam * x * (2.0 * h + x)).exp()
        };
        let scale = self.scale().min(h.max(1e-6));
        Ok(integrate_semi_infinite_scaled(integrand, 0.0, scale, spec)? * h.powf(-alpha))
    }
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let upper = (i as f64 + 1.0) / n - f;
            let lower = f - i as f64 / n;
            upper.max(lower)
        })
        .fold(0.0, f64::max)
}
