//! Per-user rate across mmWave densities and SE across array sizes, both
//! policies, closed forms only.
//!
//! cargo run --release --example rate_sweep

use uavcre::analysis::LoadModel;
use uavcre::experiments::{rate_point_analytic, se_point_analytic, ExperimentConfig};

fn main() -> uavcre::Result<()> {
    let cfg = ExperimentConfig::default();
    let params = cfg.network_params()?;
    let quad = cfg.quadrature_spec()?;
    println!("ratio   beta     tau     CRE [Gbit/s]  MAP [Gbit/s]");
    for &ratio in &cfg.sweep.density_ratios {
        let p = rate_point_analytic(&params, &quad, &cfg.cre, ratio, LoadModel::Unit)?;
        println!(
            "{ratio:5}  {:6.3}  {:6.3}  {:12.4}  {:12.4}",
            p.beta,
            p.tau,
            p.rate_cre / 1e9,
            p.rate_map / 1e9
        );
    }
    println!("\n   N    beta    SE CRE   SE MAP");
    for &n in &cfg.sweep.antennas {
        let p = se_point_analytic(&params, &quad, &cfg.cre, n)?;
        println!("{n:4}  {:6.3}  {:7.4}  {:7.4}", p.beta, p.se_cre, p.se_map);
    }
    Ok(())
}
