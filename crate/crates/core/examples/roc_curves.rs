//! Analytic and Monte Carlo operating points of the single-snapshot LRT
//! against the optimal attack, for an attacker off the claimed bearing.
//!
//! cargo run --release --example roc_curves

use std::f64::consts::PI;

use lvs_sim::montecarlo::run_roc;
use lvs_sim::prelude::*;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let legit = ChannelParams::with_received_power(KFactor::from_db(1.0)?, 1.0, db_to_linear(5.0), 100.0, path)?;
    let mal = ChannelParams::new(KFactor::from_db(1.0)?, 1.0, 1.0, path)?;
    let scn = Scenario::new(
        ArrayGeometry::ula_with_tau(4, PI)?,
        ArrayGeometry::ula_with_tau(3, PI)?,
        ArrayGeometry::ula_with_tau(8, PI)?,
        PolarPoint::new(100.0, 0.5 * PI)?,
        legit,
        mal,
        10.0,
    )?;
    let theta1 = 0.4 * PI;
    let lambdas: Vec<f64> = (-3..=3).map(|e| 10f64.powi(e)).collect();
    let reports = run_roc(&scn, theta1, &lambdas, 0.5, &TrialConfig::new(50_000, 1))?;
    println!("min KL at theta1 = 0.4pi: {:.4}", min_kl_at(&scn, theta1)?);
    println!("lambda    alpha      alpha_mc   beta       beta_mc");
    for (lambda, r) in lambdas.iter().zip(&reports) {
        println!(
            "{lambda:<8.0e}  {:<9.5}  {:<9.5}  {:<9.5}  {:.5}",
            r.analytic.alpha, r.alpha_hat.rate, r.analytic.beta, r.beta_hat.rate
        );
    }
    Ok(())
}
