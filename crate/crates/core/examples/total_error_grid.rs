//! Minimum total error of the Bayes detector over a grid of BS array sizes
//! and legitimate-channel K-factors, through the generic sweep helper.
//!
//! cargo run --example total_error_grid

use std::f64::consts::PI;

use lvs_sim::detector::min_total_error;
use lvs_sim::montecarlo::{sweep, Grid};
use lvs_sim::prelude::*;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let grid = Grid::new()
        .axis("n_b", vec![2.0, 4.0, 8.0])
        .axis("k0_db", vec![-5.0, 0.0, 5.0, 10.0]);
    let table = sweep(&grid, &["min_kl", "total_error"], |p| {
        let legit = ChannelParams::with_received_power(KFactor::from_db(p[1])?, 1.0, 1.0, 100.0, path)?;
        let mal = ChannelParams::new(KFactor::from_db(0.0)?, 1e-3, 1.0, path)?;
        let scn = Scenario::new(
            ArrayGeometry::ula_with_tau(p[0] as usize, PI)?,
            ArrayGeometry::ula_with_tau(2, PI)?,
            ArrayGeometry::ula_with_tau(2, PI)?,
            PolarPoint::new(100.0, PI / 3.0)?,
            legit,
            mal,
            10.0,
        )?;
        let d = min_kl_at(&scn, 0.25 * PI)?;
        Ok(vec![d, min_total_error(d, 0.9)?])
    })?;
    table.write_csv(std::io::stdout())
}
