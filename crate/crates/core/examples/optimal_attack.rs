//! The spoofer's best response: bearing, distance, transmit power,
//! beamformer and the antenna count it needs, checked against the KL
//! divergence of the model it actually induces.
//!
//! cargo run --example optimal_attack

use std::f64::consts::PI;

use lvs_sim::prelude::*;

fn scenario(n1: usize) -> Result<Scenario> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let legit = ChannelParams::with_received_power(KFactor::from_db(1.0)?, 1.0, db_to_linear(5.0), 80.0, path)?;
    let mal = ChannelParams::new(KFactor::from_db(5.0)?, db_to_linear(-3.0), 1.0, path)?;
    Scenario::new(
        ArrayGeometry::ula_with_tau(3, PI)?,
        ArrayGeometry::ula_with_tau(2, PI)?,
        ArrayGeometry::ula_with_tau(n1, PI)?,
        PolarPoint::new(80.0, PI / 3.0)?,
        legit,
        mal,
        10.0,
    )
}

fn main() -> Result<()> {
    let scn = scenario(4)?;
    let plan = AttackPlan::optimal(&scn)?;
    let realized = kl_divergence(&scn.legit_model()?, &plan.model(&scn)?)?;
    println!("claimed bearing     {:.4} pi", scn.claimed.theta() / PI);
    println!("attack bearing      {:.4} pi", plan.theta1_star / PI);
    println!("attack distance     {:.2} m", plan.d1);
    println!("transmit power      {:.6e}", plan.p1_star);
    println!("antennas needed     {}", plan.n1_star);
    println!("min KL (closed)     {:.6e}", plan.min_kl);
    println!("KL of attack model  {:.6e}", realized);

    // a ULA cannot tell θ from −θ, so blocking the claimed sector alone
    // leaves the mirror bearing; blocking both forces an imperfect attack
    let one = AngleInterval::new(0.2 * PI, 0.45 * PI);
    let both = vec![one, AngleInterval::new(-0.45 * PI, -0.2 * PI)];
    for (label, forbidden) in [("one side", vec![one]), ("both sides", both)] {
        let blocked = scn.clone().with_forbidden(forbidden);
        let theta = optimal_theta(&blocked)?;
        println!(
            "{label} blocked: bearing {:.4} pi, min KL {:.6}",
            theta / PI,
            min_kl_at(&blocked, theta)?
        );
    }
    Ok(())
}
