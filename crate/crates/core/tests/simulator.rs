use uavcre::analysis::LoadModel;
use uavcre::params::NetworkParams;
use uavcre::simulator::{run_trials, GainMode, SimConfig};

fn small(seed: u64) -> SimConfig {
    SimConfig {
        n_trials: 300,
        master_seed: seed,
        ..SimConfig::default()
    }
}

#[test]
fn same_seed_gives_identical_batches() {
    let p = NetworkParams::reference_profile();
    let a = run_trials(&p, &small(9)).unwrap();
    let b = run_trials(&p, &small(9)).unwrap();
    let grid = [-5.0, 0.0, 5.0];
    assert_eq!(
        a.metrics(&p, 8.0, &grid, LoadModel::Unit),
        b.metrics(&p, 8.0, &grid, LoadModel::Unit)
    );
    let c = run_trials(&p, &small(10)).unwrap();
    assert_ne!(
        a.metrics(&p, 8.0, &grid, LoadModel::Unit).coverage,
        c.metrics(&p, 8.0, &grid, LoadModel::Unit).coverage
    );
}

#[test]
fn bias_only_moves_users_toward_mmwave() {
    let p = NetworkParams::reference_profile();
    let batch = run_trials(&p, &small(2)).unwrap();
    let shares: Vec<f64> = [0.1, 1.0, 10.0, 1e6]
        .iter()
        .map(|&b| batch.metrics(&p, b, &[], LoadModel::Unit).assoc_mm)
        .collect();
    assert!(shares.windows(2).all(|w| w[1] >= w[0]), "{shares:?}");
    assert_eq!(shares[3], 1.0);
}

#[test]
fn gain_modes_share_the_drop_stream() {
    let p = NetworkParams::reference_profile();
    let geo = run_trials(&p, &small(4)).unwrap();
    let approx = run_trials(&p, &SimConfig { gain_mode: GainMode::Approximate, ..small(4) }).unwrap();
    // Same drops, so the serving distances coincide.
    for band in [uavcre::params::Band::LowFrequency, uavcre::params::Band::MmWave] {
        assert_eq!(geo.serving_distances(band), approx.serving_distances(band));
    }
}
