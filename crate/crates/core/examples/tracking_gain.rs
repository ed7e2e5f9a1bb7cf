//! Multi-slot verification: the attacker follows the best track it can
//! within its speed limit, and the accumulated KL drives the total error
//! down as the observation window grows.
//!
//! cargo run --example tracking_gain

use std::f64::consts::PI;

use lvs_sim::detector::total_error;
use lvs_sim::tracking::{constrained_attack_track, per_slot_kl, tracking_rates};
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
    let track = constrained_attack_track(&traj, &scn, 3.0, TrackMode::OnRoad)?;
    let kls = per_slot_kl(&track, &traj, &scn)?;
    let p0 = 0.6;
    let lambda = bayes_threshold(p0)?;
    let (x, y) = track.points[0].position.to_cartesian();
    println!("attacker starts at ({x:.2}, {y:.2})");
    println!("T   D_track    total_error");
    let mut acc = 0.0;
    for (t, kl) in kls.iter().enumerate() {
        acc += kl;
        let eps = total_error(tracking_rates(acc, lambda), p0);
        println!("{:<3} {acc:<10.5} {eps:.5}", t + 1);
    }
    Ok(())
}
