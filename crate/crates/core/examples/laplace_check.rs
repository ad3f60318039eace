//! Interference Laplace transforms and their derivatives against sampling
//! and finite differences.
//!
//! cargo run --release --example laplace_check

use uavcre::analysis::Analysis;
use uavcre::params::{Band, NetworkParams};
use uavcre::quadrature::QuadratureSpec;
use uavcre::simulator::{empirical_laplace, RegionRule};
use uavcre::validation::laplace_probes;

fn main() -> uavcre::Result<()> {
    let params = NetworkParams::reference_profile();
    let a = Analysis::new(params, QuadratureSpec::default())?;
    let region = RegionRule::Auto.resolve(&params)?;
    for band in [Band::LowFrequency, Band::MmWave] {
        println!("{band:?}");
        for (s, r) in laplace_probes(&params, band)? {
            let analytic = match band {
                Band::LowFrequency => a.laplace_lf(s, r)?,
                Band::MmWave => a.laplace_mm(s, r)?,
            };
            let mc = empirical_laplace(&params, band, s, r, 20_000, 3, &region)?;
            println!(
                "  r {r:6.1} m  s {s:.3e}  analytic {analytic:.5}  sampled {:.5} +- {:.5}",
                mc.mean, mc.std_err
            );
        }
    }

    let (s, r) = laplace_probes(&params, Band::MmWave)?[2];
    let d = a.laplace_mm_derivatives(2, s, r)?;
    let h = s * 1e-4;
    let fd = (a.laplace_mm(s + h, r)? - a.laplace_mm(s - h, r)?) / (2.0 * h);
    println!("\nd/ds at r {r:.1} m: series {:.6e}, central difference {fd:.6e}", d[1]);
    Ok(())
}
