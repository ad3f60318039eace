//! Conditional Laplace transforms of the aggregate interference.
//!
//! Both tiers use the PPP probability generating functional with the
//! exclusion radius equal to the serving distance `r`:
//! `L(s | r) = exp(−2πλ J(s, r))` with
//!
//! * low band: `J = ∫_r^∞ x/(1+x) z dz`, `x = s P K z^{−α}` (Rayleigh);
//! * mmWave: `J = ∫_r^∞ Σ_G p_G(z) (1 − (1 + s P G K z^{−α}/m)^{−m}) z dz`.

use std::f64::consts::PI;

use super::bell::{complete_bell, rising_factorial};
use super::Analysis;
use crate::error::{Error, Result};
use crate::quadrature::integrate_semi_infinite_scaled;

fn check_args(s: f64, r: f64, h: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::Domain(format!("Laplace variable must be >= 0, got {s}")));
    }
    if !(r >= h) || r.is_nan() {
        return Err(Error::Domain(format!(
            "exclusion radius {r} is below the UAV height {h}"
        )));
    }
    Ok(())
}

impl Analysis {
    /// `∫_r^∞ x/(1+x) z dz` for the low-frequency tier.
    pub(crate) fn interference_exponent_lf(&self, s: f64, r: f64) -> Result<f64> {
        let cfg = &self.params.lf;
        let c = s * cfg.tx_power_w * cfg.pathloss_const();
        let alpha = cfg.pathloss_exp;
        let integrand = |z: f64| {
            let x = c * z.powf(-alpha);
            x / (1.0 + x) * z
        };
        let knee = c.powf(1.0 / alpha);
        integrate_semi_infinite_scaled(integrand, r, knee.max(r), &self.quad.inner())
    }

    /// `E[exp(−s I_lf) | r]`.
    pub fn laplace_lf(&self, s: f64, r: f64) -> Result<f64> {
        check_args(s, r, self.params.height)?;
        if s == 0.0 {
            return Ok(1.0);
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        let j = self.interference_exponent_lf(s, r)?;
        Ok((-2.0 * PI * self.params.lf.density * j).exp())
    }

    /// `n = 0`: the exponent `J(s, r)`; `n ≥ 1`:
    /// `∫_r^∞ Σ_G p_G(z) c^n (1 + s c)^{−m−n} z dz` with `c = P G K z^{−α}/m`.
    pub(crate) fn interference_moment_mm(&self, n: u32, s: f64, r: f64) -> Result<f64> {
        let cfg = &self.params.mm;
        let m = cfg.nakagami_m();
        let mf = m as f64;
        let alpha = cfg.pathloss_exp;
        let base = cfg.tx_power_w * cfg.pathloss_const() / mf;
        let gains = self.gain_model;
        // The moments scale like s^{−n}; integrate (k c)^n with k ≈ s so the
        // integrand is O(1) and the relative tolerance is what binds.
        let k = if s > 0.0 {
            s
        } else {
            r.powf(alpha) / (base * self.params.pattern.gain_main)
        };
        let integrand = |z: f64| {
            let atoms = gains.dist(z).atoms();
            let zp = z.powf(-alpha);
            let mut acc = 0.0;
            for (g, p) in atoms {
                if p == 0.0 {
                    continue;
                }
                let c = base * g * zp;
                let term = if n == 0 {
                    // 1 − (1 + s c)^{−m} without cancellation.
                    -(-mf * (s * c).ln_1p()).exp_m1()
                } else {
                    (k * c).powi(n as i32) * (-(mf + n as f64) * (s * c).ln_1p()).exp()
                };
                acc += p * term;
            }
            acc * z
        };
        let knee = (s.max(1e-300) * base * self.params.pattern.gain_main).powf(1.0 / alpha);
        let spec = self.quad.inner();
        let unscale = if n == 0 { 1.0 } else { k.powi(-(n as i32)) };
        // The main-lobe probability lives within a few PPP spacings of h;
        // integrate that stretch separately so the transform map sees a
        // smooth tail.
        let feature_end = self.params.height + 6.0 / (PI * self.params.mm.density).sqrt();
        if r < feature_end {
            let near = crate::quadrature::integrate(integrand, r, feature_end, &spec)?;
            let far = integrate_semi_infinite_scaled(integrand, feature_end, knee.max(feature_end), &spec)?;
            Ok((near + far) * unscale)
        } else {
            Ok(integrate_semi_infinite_scaled(integrand, r, knee.max(r), &spec)? * unscale)
        }
    }

    /// `E[exp(−s I_m) | r]` under the configured interferer gain law and
    /// Nakagami-m fading.
    pub fn laplace_mm(&self, s: f64, r: f64) -> Result<f64> {
        check_args(s, r, self.params.height)?;
        if s == 0.0 {
            return Ok(1.0);
        }
        if s.is_infinite() {
            return Ok(0.0);
        }
        let j = self.interference_moment_mm(0, s, r)?;
        Ok((-2.0 * PI * self.params.mm.density * j).exp())
    }

    /// `∂ⁱ/∂sⁱ L_m(s | r)` for `0 ≤ i ≤ m − 1`.
    pub fn laplace_mm_derivative(&self, order: u32, s: f64, r: f64) -> Result<f64> {
        let m = self.params.mm.nakagami_m();
        if order >= m {
            return Err(Error::param(
                "order",
                format!("derivative order {order} must be below the Nakagami shape {m}"),
            ));
        }
        Ok(self.laplace_mm_derivatives(order, s, r)?[order as usize])
    }

    /// `[L, L′, …, L⁽ⁿ⁾]` at `(s, r)`: one quadrature per derivative of the
    /// exponent, combined through complete Bell polynomials.
    pub fn laplace_mm_derivatives(&self, max_order: u32, s: f64, r: f64) -> Result<Vec<f64>> {
        check_args(s, r, self.params.height)?;
        if s.is_infinite() {
            return Ok(vec![0.0; max_order as usize + 1]);
        }
        let lam = self.params.mm.density;
        let m = self.params.mm.nakagami_m();
        let value = if s == 0.0 {
            1.0
        } else {
            (-2.0 * PI * lam * self.interference_moment_mm(0, s, r)?).exp()
        };
        // g(s) = −2πλ J(s); g⁽ⁿ⁾ = 2πλ (−1)^{n+1}… expressed via the moments:
        // J⁽ⁿ⁾ = −(−1)ⁿ (m)ₙ Iₙ, hence g⁽ⁿ⁾ = 2πλ (−1)ⁿ (m)ₙ Iₙ.
        let mut g_derivs = Vec::with_capacity(max_order as usize);
        for n in 1..=max_order {
            let moment = self.interference_moment_mm(n, s, r)?;
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            g_derivs.push(2.0 * PI * lam * sign * rising_factorial(m, n) * moment);
        }
        let bell = complete_bell(&g_derivs);
        Ok(bell.into_iter().map(|b| value * b).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::antenna::UpaPattern;
    use crate::params::{Fading, NetworkParams};
    use crate::quadrature::QuadratureSpec;
    use approx::assert_relative_eq;

    fn analysis() -> Analysis {
        Analysis::new(NetworkParams::reference_profile(), QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn transforms_equal_one_at_zero() {
        let a = analysis();
        assert_eq!(a.laplace_lf(0.0, 80.0).unwrap(), 1.0);
        assert_eq!(a.laplace_mm(0.0, 80.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let a = analysis();
        assert!(a.laplace_lf(-1.0, 80.0).is_err());
        assert!(a.laplace_mm(1.0, 10.0).is_err());
        assert!(a.laplace_mm_derivative(2, 1e9, 60.0).is_err());
    }

    #[test]
    fn far_exclusion_removes_interference() {
        let a = analysis();
        let s = 1e9;
        // α_lf = 2.5 leaves a heavy r^{−1/2} tail in the exponent.
        let far = a.laplace_lf(s, 1e15).unwrap();
        assert!(far > 1.0 - 1e-6, "{far}");
        assert!(a.laplace_mm(s, 1e7).unwrap() > 1.0 - 1e-6);
    }

    #[test]
    fn monotone_in_s_and_r() {
        let a = analysis();
        let ss = [1e8, 1e9, 1e10, 1e11];
        for w in ss.windows(2) {
            assert!(a.laplace_lf(w[1], 150.0).unwrap() < a.laplace_lf(w[0], 150.0).unwrap());
            assert!(a.laplace_mm(w[1], 60.0).unwrap() < a.laplace_mm(w[0], 60.0).unwrap());
        }
        let rs = [55.0, 80.0, 150.0, 400.0];
        for w in rs.windows(2) {
            assert!(a.laplace_lf(1e10, w[1]).unwrap() > a.laplace_lf(1e10, w[0]).unwrap());
            assert!(a.laplace_mm(1e10, w[1]).unwrap() > a.laplace_mm(1e10, w[0]).unwrap());
        }
    }

    #[test]
    fn degenerate_gain_law_matches_single_gain_transform() {
        // N = 4 pattern with G_S forced to G_M: expectation over gains collapses.
        let mut p = NetworkParams::reference_profile();
        let mut pat = UpaPattern::from_count(4).unwrap();
        pat.gain_side = pat.gain_main;
        p.pattern = pat;
        let a = Analysis::new(p, QuadratureSpec::default()).unwrap();
        let (s, r) = (3e10, 70.0);
        let m = p.mm.nakagami_m() as f64;
        let c = p.mm.tx_power_w * pat.gain_main * p.mm.pathloss_const() / m;
        let j = crate::quadrature::integrate_semi_infinite_scaled(
            |z| -(-m * (s * c * z.powf(-3.0)).ln_1p()).exp_m1() * z,
            r,
            100.0,
            &QuadratureSpec { rel_tol: 1e-11, ..Default::default() },
        )
        .unwrap();
        let direct = (-2.0 * PI * p.mm.density * j).exp();
        assert_relative_eq!(a.laplace_mm(s, r).unwrap(), direct, max_relative = 1e-7);
    }

    #[test]
    fn zeroth_and_first_derivative_structure() {
        let mut p = NetworkParams::reference_profile();
        p.mm.fading = Fading::Nakagami(3);
        let a = Analysis::new(p, QuadratureSpec::default()).unwrap();
        let (s, r) = (2e10, 60.0);
        let l = a.laplace_mm(s, r).unwrap();
        assert_relative_eq!(a.laplace_mm_derivative(0, s, r).unwrap(), l, max_relative = 1e-12);
        let d1 = a.laplace_mm_derivative(1, s, r).unwrap();
        assert!(d1 < 0.0);
        let d2 = a.laplace_mm_derivative(2, s, r).unwrap();
        assert!(d2 > 0.0);
    }
}
