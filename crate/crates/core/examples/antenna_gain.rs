//! Sectorized array gains and the two-point interferer gain law, compared
//! with the main-lobe frequency of randomly steered geometric beams.
//!
//! cargo run --release --example antenna_gain

use uavcre::antenna::{ElevationModel, UpaPattern};
use uavcre::params::NetworkParams;
use uavcre::simulator::main_lobe_hit_frequency;

fn main() -> uavcre::Result<()> {
    println!("   N   az bw [deg]  el bw [deg]   G_M        G_S");
    for n in [16, 64, 256] {
        let p = UpaPattern::from_count(n)?;
        println!(
            "{n:4}  {:10.2}  {:10.2}  {:9.3}  {:.3e}",
            p.bw_azimuth.to_degrees(),
            p.bw_elevation.to_degrees(),
            p.gain_main,
            p.gain_side
        );
    }

    let params = NetworkParams::reference_profile();
    let models = [
        ElevationModel::MeanValue,
        ElevationModel::CdfDifference,
        ElevationModel::Uniform,
    ]
    .map(|m| params.with_elevation(m).gain_model());
    println!("\n d/h   simulated   mean-value   cdf-diff    uniform");
    for k in [1.05, 1.2, 1.4, 1.6, 2.0] {
        let d = k * params.height;
        let hit = main_lobe_hit_frequency(&params, d, 2_000_000, 7)?;
        print!("{k:4.2}  {:.3e}", hit.mean);
        for m in &models {
            print!("   {:.3e}", m.p_main(d));
        }
        println!();
    }
    let g = models[0].dist(60.0);
    println!("\nmean interferer gain at 60 m: {:.4}", g.mean_gain());
    Ok(())
}
