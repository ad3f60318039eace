//! Nearest-UAV slant distance: closed-form law against samples.
//!
//! cargo run --release --example serving_distance

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uavcre::geometry::{ks_statistic, ServingDistanceDist};

fn main() -> uavcre::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (per_km2, h) in [(10.0, 50.0), (500.0, 50.0), (100.0, 120.0)] {
        let law = ServingDistanceDist::new(per_km2 * 1e-6, h)?;
        let mut samples: Vec<f64> = (0..100_000).map(|_| law.sample(&mut rng)).collect();
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let ks = ks_statistic(&mut samples, |r| law.cdf(r));
        println!(
            "{per_km2:>5}/km^2 h={h:>5} m  median {:7.1} m  p90 {:7.1} m  sample mean {mean:7.1} m  KS {ks:.4}",
            law.quantile(0.5),
            law.quantile(0.9),
        );
    }
    let law = ServingDistanceDist::new(5e-4, 50.0)?;
    println!("\n   r [m]      pdf          cdf");
    for r in [50.0, 55.0, 60.0, 70.0, 90.0] {
        println!("{r:8.1}  {:.6e}  {:.6}", law.pdf(r), law.cdf(r));
    }
    Ok(())
}
