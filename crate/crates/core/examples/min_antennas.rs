//! Antennas the spoofer needs to reproduce the legitimate covariance, as a
//! function of its own K-factor and noise floor.
//!
//! cargo run --example min_antennas

use std::f64::consts::PI;

use lvs_sim::prelude::*;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let legit = ChannelParams::with_received_power(
        KFactor::from_db(0.0)?,
        db_to_linear(-85.0),
        db_to_linear(-75.0),
        100.0,
        path,
    )?;
    let sigmas = [-100.0, -95.0, -90.0, -87.0];
    print!("k1_db ");
    for s in sigmas {
        print!(" s1={s:<5}");
    }
    println!();
    for k1 in [-10.0, -5.0, 0.0, 5.0, 10.0] {
        print!("{k1:>5} ");
        for s1 in sigmas {
            let mal = ChannelParams::new(KFactor::from_db(k1)?, db_to_linear(s1), 1.0, path)?;
            let scn = Scenario::new(
                ArrayGeometry::ula_with_tau(4, PI)?,
                ArrayGeometry::ula_with_tau(3, PI)?,
                ArrayGeometry::ula_with_tau(2, PI)?,
                PolarPoint::new(100.0, PI / 3.0)?,
                legit.clone(),
                mal,
                10.0,
            )?;
            match min_antennas(&scn) {
                Ok(n) => print!(" {n:<8}"),
                Err(e) if e.is_infeasible() => print!(" {:<8}", "-"),
                Err(e) => return Err(e),
            }
        }
        println!();
    }
    Ok(())
}
