//! Array correlation `|r(θ₀)†r(θ₁)|²` from the closed form and from the
//! steering vectors directly, for a few array sizes.
//!
//! cargo run --example steering_correlation

use std::f64::consts::PI;

use lvs_sim::geometry::{correlation_mag_sq, steering_rx, ArrayGeometry};
use lvs_sim::Result;

fn main() -> Result<()> {
    let theta0 = PI / 3.0;
    println!("n_b  theta1/pi  closed_form       direct");
    for n in [2, 4, 8] {
        let bs = ArrayGeometry::ula_with_tau(n, PI)?;
        let r0 = steering_rx(theta0, &bs)?;
        for k in 0..=4 {
            let theta1 = k as f64 * 0.25 * PI;
            let r1 = steering_rx(theta1, &bs)?;
            let direct = r0.dotc(&r1).norm_sqr();
            let closed = correlation_mag_sq(theta0, theta1, &bs)?;
            println!("{n:>3}  {:>9.2}  {closed:<16.10}  {direct:.10}", theta1 / PI);
        }
    }
    Ok(())
}
