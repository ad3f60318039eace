//! Seeded Monte Carlo run next to the closed forms.
//!
//! cargo run --release --example monte_carlo [trials]

use uavcre::analysis::{Analysis, LoadModel};
use uavcre::association::CrePolicy;
use uavcre::params::NetworkParams;
use uavcre::quadrature::QuadratureSpec;
use uavcre::simulator::{run_trials, SimConfig};

fn main() -> uavcre::Result<()> {
    let trials = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5_000);
    let params = NetworkParams::reference_profile();
    let analysis = Analysis::new(params, QuadratureSpec::default())?;
    let beta = CrePolicy::from_network(&analysis, 5.0, 5.0)?.beta;
    let sim = SimConfig {
        n_trials: trials,
        ..SimConfig::default()
    };
    let grid = [-5.0, 0.0, 5.0, 10.0];
    let batch = run_trials(&params, &sim)?;
    println!(
        "{trials} drops, planar radii {:.0} m / {:.0} m, {} empty-band redraws",
        batch.region.radius_lf,
        batch.region.radius_mm,
        batch.redraws()
    );
    for (name, b) in [("CRE", beta), ("MAP", 1.0)] {
        let emp = batch.metrics(&params, b, &grid, LoadModel::Unit);
        let ana = analysis.metrics(b, &grid, LoadModel::Unit)?;
        println!("\n{name} (beta {b:.3}): mmWave share {:.4} simulated, {:.4} analytic", emp.assoc_mm, ana.assoc_mm);
        for (e, a) in emp.coverage.iter().zip(&ana.coverage) {
            println!("  {:5.1} dB  {:.4}  {:.4}", e.0, e.1, a.1);
        }
    }
    Ok(())
}
