//! Analytic coverage per band and for the mixed network under CRE and MAP.
//!
//! cargo run --release --example coverage_curve

use uavcre::analysis::{db_grid, Analysis};
use uavcre::association::CrePolicy;
use uavcre::params::{db_to_linear, NetworkParams};
use uavcre::quadrature::QuadratureSpec;

fn main() -> uavcre::Result<()> {
    let a = Analysis::new(NetworkParams::reference_profile(), QuadratureSpec::default())?;
    let beta = CrePolicy::from_network(&a, 5.0, 5.0)?.beta;
    let (a_cre, a_map) = (a.assoc_prob_mmwave(beta)?, a.assoc_prob_mmwave(1.0)?);
    println!("gamma_dB  low-band   mmWave     CRE        MAP");
    for db in db_grid(-10.0, 20.0, 5.0) {
        let g = db_to_linear(db);
        println!(
            "{db:8.1}  {:.4}     {:.4}     {:.4}     {:.4}",
            a.coverage_lf(g)?,
            a.coverage_mm(g)?,
            a.coverage_mixed(g, a_cre)?,
            a.coverage_mixed(g, a_map)?
        );
    }
    println!("\nSE: low-band {:.4}, mmWave {:.4} bit/s/Hz", a.se_lf()?, a.se_mm()?);
    Ok(())
}
