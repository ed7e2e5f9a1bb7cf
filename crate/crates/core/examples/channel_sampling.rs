//! Rician channel draws: observations built from an explicit channel matrix
//! match the Gaussian observation model in mean and variance.
//!
//! cargo run --release --example channel_sampling

use std::f64::consts::PI;

use lvs_sim::channel::{los_matrix, mean_vector, sample_observation_via_channel};
use lvs_sim::geometry::steering_tx;
use lvs_sim::linalg::CVector;
use lvs_sim::prelude::*;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<()> {
    let path = PathLossParams::new(1.0, 3.0, 5.9e9)?;
    let params = ChannelParams::with_received_power(KFactor::from_db(3.0)?, 0.5, 2.0, 50.0, path)?;
    let bs = ArrayGeometry::ula_with_tau(4, PI)?;
    let veh = ArrayGeometry::ula_with_tau(2, PI)?;
    let los = los_matrix(PI / 4.0, &steering_tx(PI / 2.0, &veh)?, &bs)?;
    let b = CVector::from_element(2, Complex64::new(0.5f64.sqrt(), 0.0));
    let mean = mean_vector(&params, 50.0, &los, &b)?;
    let cov = lvs_sim::channel::cov_scalar(&params, 50.0)?;

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 200_000;
    let mut sum = CVector::zeros(4);
    let mut sq = 0.0;
    for i in 0..draws {
        let y = sample_observation_via_channel(&params, 50.0, &los, &b, i, &mut rng)?.y;
        sq += (&y - &mean).norm_squared();
        sum += y;
    }
    let emp_mean = sum / Complex64::new(draws as f64, 0.0);
    println!("model mean      {:?}", mean.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    println!("empirical mean  {:?}", emp_mean.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    println!("model per-antenna variance {cov:.4}, empirical {:.4}", sq / (4.0 * draws as f64));
    Ok(())
}
