//! Effect of noisy location claims on the tracking detector's false
//! positive rate, with the same seed for the clean and jittered runs.
//!
//! cargo run --release --example jitter_robustness

use std::f64::consts::PI;

use lvs_sim::montecarlo::{jitter_std_for_mean_error, run_tracking};
use lvs_sim::units::kmh_to_mps;
use lvs_sim::prelude::*;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let legit = ChannelParams::new(KFactor::from_db(-10.0)?, db_to_linear(-90.0), db_to_linear(30.0), path)?;
    let mal = ChannelParams::new(KFactor::from_db(-10.0)?, db_to_linear(-90.0), 1.0, path)?;
    let start = PolarPoint::from_cartesian(10.0, 10.0)?;
    let scn = Scenario::new(
        ArrayGeometry::ula_with_tau(3, PI)?,
        ArrayGeometry::ula_with_tau(2, PI)?,
        ArrayGeometry::ula_with_tau(8, PI)?,
        start,
        legit.clone(),
        mal,
        100.0,
    )?;
    let traj = Trajectory::new(start, Heading::Angle(PI), kmh_to_mps(20.0), 0.1, 10, &legit)?;
    let det = DetectorConfig::bayes(0.6)?;
    let trials = TrialConfig::new(20_000, 3).with_t_range(1..=1);
    println!("mean_error_m  alpha_mc  se");
    for mean_error in [0.0, 1.0, 2.5, 5.0, 10.0] {
        let cfg = trials.clone().with_jitter(jitter_std_for_mean_error(mean_error));
        let r = run_tracking(&traj, &scn, 3.0, TrackMode::OnRoad, &det, &cfg)?;
        println!("{mean_error:<12}  {:.5}   {:.5}", r.alpha_hat.rate, r.alpha_hat.se);
    }
    Ok(())
}
