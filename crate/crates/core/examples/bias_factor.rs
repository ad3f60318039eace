//! Adaptive bias: the logistic curve in the SE ratio and what it does to the
//! mmWave association share.
//!
//! cargo run --release --example bias_factor

use uavcre::analysis::Analysis;
use uavcre::association::{bias_factor, CrePolicy};
use uavcre::params::NetworkParams;
use uavcre::quadrature::QuadratureSpec;

fn main() -> uavcre::Result<()> {
    let analysis = Analysis::new(NetworkParams::reference_profile(), QuadratureSpec::default())?;
    let policy = CrePolicy::from_network(&analysis, 5.0, 5.0)?;
    println!(
        "zeta {:.4}  tau {:.4}  beta {:.4}",
        policy.zeta, policy.tau, policy.beta
    );
    println!(
        "mmWave share: MAP {:.4}, CRE {:.4}",
        analysis.assoc_prob_mmwave(1.0)?,
        analysis.assoc_prob_mmwave(policy.beta)?
    );

    println!("\n tau   beta (growth 1)  beta (growth 5)");
    for i in 0..=8 {
        let tau = i as f64 * 0.5;
        println!(
            "{tau:4.1}  {:14.4}  {:14.4}",
            bias_factor(5.0, 1.0, policy.zeta, tau)?,
            bias_factor(5.0, 5.0, policy.zeta, tau)?
        );
    }
    Ok(())
}
