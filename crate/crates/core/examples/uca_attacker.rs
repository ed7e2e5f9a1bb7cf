//! A spoofer with a uniform circular array: the same power and beamformer
//! rules apply, and the minimum KL does not depend on the attacker's array.
//!
//! cargo run --example uca_attacker

use std::f64::consts::PI;

use lvs_sim::prelude::*;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let legit = ChannelParams::with_received_power(KFactor::from_db(1.0)?, 1.0, db_to_linear(5.0), 80.0, path)?;
    let mal = ChannelParams::new(KFactor::from_db(5.0)?, db_to_linear(-3.0), 1.0, path)?;
    let ula = Scenario::new(
        ArrayGeometry::ula_with_tau(3, PI)?,
        ArrayGeometry::ula_with_tau(2, PI)?,
        ArrayGeometry::ula_with_tau(6, PI)?,
        PolarPoint::new(80.0, PI / 3.0)?,
        legit,
        mal,
        10.0,
    )?;
    let uca = ula.with_attacker_array(ArrayGeometry::uca_with_tau(6, PI)?);
    let theta1 = 0.3 * PI;
    let null = ula.legit_model()?;
    for (name, scn) in [("ula", &ula), ("uca", &uca)] {
        let plan = AttackPlan::at(scn, theta1, 40.0)?;
        let kl = kl_divergence(&null, &plan.model(scn)?)?;
        println!("{name}: p1 = {:.6e}, |b1| = {:.12}, KL = {kl:.12e}", plan.p1_star, plan.b1_star.norm());
    }
    println!("closed form:  KL = {:.12e}", min_kl_at(&ula, theta1)?);
    Ok(())
}
