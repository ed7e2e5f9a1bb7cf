//! Rician channel model and the Gaussian observation it induces.
//!
//! With pilot `s = 1`, the snapshot at the BS is
//! `y = √(p·g(d))·H·b + n`, and marginalizing the scattered part of `H` and
//! the noise gives `y ~ CN(m, R)` with
//! `m = √(p g K/(1+K))·H̄·b` and `R = (p g/(1+K) + σ²)·I`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geometry::{path_loss, steering_rx, ArrayGeometry, PathLossParams};
use crate::linalg::{check_len, norm_sq, CMatrix, CRowVector, CVector};
use crate::units::db_to_linear;
use crate::{Error, Result};

/// Rician K-factor. `PureLos` is the K = ∞ limit with no scattered power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFactor {
    Linear(f64),
    PureLos,
}

impl KFactor {
    pub fn linear(k: f64) -> Result<Self> {
        if !(k >= 0.0) {
            return Err(Error::InvalidParameter(format!("K-factor must be >= 0, got {k}")));
        }
        if k.is_infinite() {
            return Ok(KFactor::PureLos);
        }
        Ok(KFactor::Linear(k))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Self::linear(db_to_linear(db))
    }

    /// Linear value; `f64::INFINITY` for pure LOS.
    pub fn value(&self) -> f64 {
        match self {
            KFactor::Linear(k) => *k,
            KFactor::PureLos => f64::INFINITY,
        }
    }

    /// `K/(1+K)`.
    pub fn los_fraction(&self) -> f64 {
        match self {
            KFactor::Linear(k) => k / (1.0 + k),
            KFactor::PureLos => 1.0,
        }
    }

    /// `1/(1+K)`.
    pub fn diffuse_fraction(&self) -> f64 {
        match self {
            KFactor::Linear(k) => 1.0 / (1.0 + k),
            KFactor::PureLos => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelParams {
    pub k_factor: KFactor,
    pub noise_var: f64,
    pub tx_power: f64,
    pub path: PathLossParams,
}

impl ChannelParams {
    pub fn new(k_factor: KFactor, noise_var: f64, tx_power: f64, path: PathLossParams) -> Result<Self> {
        if !(noise_var > 0.0) {
            return Err(Error::InvalidParameter(format!("noise variance must be > 0, got {noise_var}")));
        }
        if !(tx_power >= 0.0) || !tx_power.is_finite() {
            return Err(Error::InvalidParameter(format!("transmit power must be >= 0, got {tx_power}")));
        }
        Ok(Self {
            k_factor,
            noise_var,
            tx_power,
            path,
        })
    }

    /// Picks the transmit power so that `p·g(d) = rx_power` at distance `d`.
    pub fn with_received_power(
        k_factor: KFactor,
        noise_var: f64,
        rx_power: f64,
        d: f64,
        path: PathLossParams,
    ) -> Result<Self> {
        let g = path_loss(d, &path)?;
        Self::new(k_factor, noise_var, rx_power / g, path)
    }

    /// `p·g(d)`.
    pub fn received_power(&self, d: f64) -> Result<f64> {
        Ok(self.tx_power * path_loss(d, &self.path)?)
    }
}

/// `y ~ CN(mean, cov_scalar·I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianObsModel {
    mean: CVector,
    cov_scalar: f64,
}

impl GaussianObsModel {
    pub fn new(mean: CVector, cov_scalar: f64) -> Result<Self> {
        if !(cov_scalar > 0.0) || !cov_scalar.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "covariance scalar must be > 0, got {cov_scalar}"
            )));
        }
        Ok(Self { mean, cov_scalar })
    }

    pub fn mean(&self) -> &CVector {
        &self.mean
    }

    pub fn cov_scalar(&self) -> f64 {
        self.cov_scalar
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSnapshot {
    pub y: CVector,
    pub slot: usize,
}

impl ObservationSnapshot {
    /// The zero-covariance limit: the snapshot equals the mean.
    pub fn noiseless(model: &GaussianObsModel, slot: usize) -> Self {
        Self {
            y: model.mean.clone(),
            slot,
        }
    }
}

/// One CN(0, 1) draw: real and imaginary parts independent N(0, ½).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// LOS matrix `H̄ = r(θ)·t`.
pub fn los_matrix(theta_rx: f64, tx_steering: &CRowVector, bs: &ArrayGeometry) -> Result<CMatrix> {
    if tx_steering.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: 0,
        });
    }
    let r = steering_rx(theta_rx, bs)?;
    Ok(&r * tx_steering)
}

/// `H = √(K/(1+K))·H̄ + √(1/(1+K))·H̃`, `H̃` i.i.d. CN(0, 1).
pub fn sample_channel<R: Rng + ?Sized>(k_factor: KFactor, los: &CMatrix, rng: &mut R) -> CMatrix {
    let a = k_factor.los_fraction().sqrt();
    if matches!(k_factor, KFactor::PureLos) {
        return los.clone();
    }
    let b = k_factor.diffuse_fraction().sqrt();
    CMatrix::from_fn(los.nrows(), los.ncols(), |i, j| {
        los[(i, j)] * a + complex_normal(rng) * b
    })
}

fn check_unit(beamformer: &CVector) -> Result<()> {
    let n = beamformer.norm();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitBeamformer(n));
    }
    Ok(())
}

/// `m = √(p g(d) K/(1+K))·H̄·b`.
pub fn mean_vector(params: &ChannelParams, d: f64, los: &CMatrix, beamformer: &CVector) -> Result<CVector> {
    check_unit(beamformer)?;
    check_len(los.ncols(), beamformer.len())?;
    let amp = (params.received_power(d)? * params.k_factor.los_fraction()).sqrt();
    Ok(los * beamformer * Complex64::new(amp, 0.0))
}

/// `p g(d)/(1+K) + σ²`.
pub fn cov_scalar(params: &ChannelParams, d: f64) -> Result<f64> {
    Ok(params.received_power(d)? * params.k_factor.diffuse_fraction() + params.noise_var)
}

/// Draws `y = mean + √cov·w` with `w` i.i.d. CN(0, 1).
pub fn sample_observation<R: Rng + ?Sized>(
    model: &GaussianObsModel,
    slot: usize,
    rng: &mut R,
) -> ObservationSnapshot {
    let s = model.cov_scalar.sqrt();
    let y = model.mean.map(|m| m + complex_normal(rng) * s);
    ObservationSnapshot { y, slot }
}

/// Explicit route: draw `H`, then add noise. Distributed as [`sample_observation`]
/// on the model built from the same parameters.
pub fn sample_observation_via_channel<R: Rng + ?Sized>(
    params: &ChannelParams,
    d: f64,
    los: &CMatrix,
    beamformer: &CVector,
    slot: usize,
    rng: &mut R,
) -> Result<ObservationSnapshot> {
    check_unit(beamformer)?;
    check_len(los.ncols(), beamformer.len())?;
    let h = sample_channel(params.k_factor, los, rng);
    let amp = params.received_power(d)?.sqrt();
    let noise_sd = params.noise_var.sqrt();
    let signal = &h * beamformer * Complex64::new(amp, 0.0);
    let y = signal.map(|v| v + complex_normal(rng) * noise_sd);
    Ok(ObservationSnapshot { y, slot })
}

/// `ln f(y) = −N ln(π·cov) − ‖y − m‖²/cov`.
pub fn log_likelihood(y: &CVector, model: &GaussianObsModel) -> Result<f64> {
    check_len(model.dim(), y.len())?;
    let n = y.len() as f64;
    let resid = norm_sq(&(y - &model.mean));
    Ok(-n * (std::f64::consts::PI * model.cov_scalar).ln() - resid / model.cov_scalar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::steering_tx_ula;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn path() -> PathLossParams {
        PathLossParams::new(1.0, 3.0, 5.9e9).unwrap()
    }

    #[test]
    fn los_examples() {
        let bs = ArrayGeometry::ula_with_tau(3, PI).unwrap();
        let veh = ArrayGeometry::ula_with_tau(2, PI).unwrap();
        let t = steering_tx_ula(PI / 2.0, &veh).unwrap();
        let h = los_matrix(PI / 2.0, &t, &bs).unwrap();
        assert!(h.iter().all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-12));

        let bs1 = ArrayGeometry::ula_with_tau(1, PI).unwrap();
        let v1 = ArrayGeometry::ula_with_tau(1, PI).unwrap();
        let h = los_matrix(0.3, &steering_tx_ula(0.2, &v1).unwrap(), &bs1).unwrap();
        assert_eq!(h.shape(), (1, 1));
        assert!((h[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let bs2 = ArrayGeometry::ula_with_tau(2, PI).unwrap();
        let h = los_matrix(0.0, &steering_tx_ula(0.0, &veh).unwrap(), &bs2).unwrap();
        let want = [[1.0, -1.0], [-1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((h[(i, j)] - Complex64::new(want[i][j], 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pure_los_channel_is_exact() {
        let bs = ArrayGeometry::ula_with_tau(3, PI).unwrap();
        let veh = ArrayGeometry::ula_with_tau(2, PI).unwrap();
        let los = los_matrix(0.4, &steering_tx_ula(0.9, &veh).unwrap(), &bs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(sample_channel(KFactor::PureLos, &los, &mut rng), los);
    }

    #[test]
    fn channel_moments() {
        let bs = ArrayGeometry::ula_with_tau(2, PI).unwrap();
        let veh = ArrayGeometry::ula_with_tau(1, PI).unwrap();
        let los = los_matrix(0.0, &steering_tx_ula(0.0, &veh).unwrap(), &bs).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 200_000;
        for (k, mean_scale, var) in [(0.0, 0.0, 1.0), (1.0, 0.5f64.sqrt(), 0.5)] {
            let kf = KFactor::linear(k).unwrap();
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sq = 0.0;
            for _ in 0..n {
                let h = sample_channel(kf, &los, &mut rng);
                sum += h[(1, 0)];
                sq += (h[(1, 0)] - los[(1, 0)] * mean_scale).norm_sqr();
            }
            let mean = sum / n as f64;
            let se = (var / n as f64).sqrt();
            assert!((mean - los[(1, 0)] * mean_scale).norm() < 4.0 * se, "K={k} mean {mean}");
            let v = sq / n as f64;
            // variance of |z|² for complex Gaussian is var², so SE = var/√n
            assert!((v - var).abs() < 4.0 * var / (n as f64).sqrt(), "K={k} var {v}");
        }
    }

    #[test]
    fn mean_and_covariance() {
        let bs = ArrayGeometry::ula_with_tau(4, PI).unwrap();
        let veh = ArrayGeometry::ula_with_tau(3, PI).unwrap();
        let t0 = steering_tx_ula(PI / 2.0, &veh).unwrap();
        let los = los_matrix(PI / 2.0, &t0, &bs).unwrap();
        let b0 = t0.adjoint() / Complex64::new(t0.norm(), 0.0);

        let rayleigh = ChannelParams::new(KFactor::Linear(0.0), 1.0, 2.0, path()).unwrap();
        let m = mean_vector(&rayleigh, 10.0, &los, &b0).unwrap();
        assert!(m.iter().all(|z| z.norm() == 0.0));

        let k = 1.2;
        let params = ChannelParams::new(KFactor::Linear(k), 1e-9, 50.0, path()).unwrap();
        let m = mean_vector(&params, 10.0, &los, &b0).unwrap();
        let pg = params.received_power(10.0).unwrap();
        let want = (pg * k * 3.0 / (1.0 + k)).sqrt();
        assert!(m.iter().all(|z| (z - Complex64::new(want, 0.0)).norm() < 1e-12 * want));

        let bad = CVector::from_element(3, Complex64::new(1.0, 0.0));
        assert!(matches!(mean_vector(&params, 10.0, &los, &bad), Err(Error::NonUnitBeamformer(_))));

        let silent = ChannelParams::new(KFactor::Linear(1.0), 0.3, 0.0, path()).unwrap();
        assert_eq!(cov_scalar(&silent, 5.0).unwrap(), 0.3);
        let r0 = ChannelParams::new(KFactor::Linear(0.0), 0.3, 2.0, path()).unwrap();
        let pg = r0.received_power(5.0).unwrap();
        assert!((cov_scalar(&r0, 5.0).unwrap() - (pg + 0.3)).abs() < 1e-15);
        // K = 1 with p g = 2σ² gives 2σ²
        let s2 = 0.25;
        let k1 = ChannelParams::with_received_power(KFactor::Linear(1.0), s2, 2.0 * s2, 8.0, path()).unwrap();
        assert!((cov_scalar(&k1, 8.0).unwrap() - 2.0 * s2).abs() < 1e-15);
        let los_only = ChannelParams::new(KFactor::PureLos, 0.3, 2.0, path()).unwrap();
        assert_eq!(cov_scalar(&los_only, 5.0).unwrap(), 0.3);
    }

    #[test]
    fn arbitrary_beamformer_matches_matrix_vector_oracle() {
        let bs = ArrayGeometry::ula_with_tau(2, 2.0).unwrap();
        let veh = ArrayGeometry::ula_with_tau(2, 1.5).unwrap();
        let los = los_matrix(0.7, &steering_tx_ula(1.1, &veh).unwrap(), &bs).unwrap();
        let b = CVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        let params = ChannelParams::new(KFactor::Linear(2.0), 1.0, 3.0, path()).unwrap();
        let m = mean_vector(&params, 2.0, &los, &b).unwrap();
        let amp = (params.received_power(2.0).unwrap() * 2.0 / 3.0).sqrt();
        for i in 0..2 {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..2 {
                acc += los[(i, j)] * b[j];
            }
            assert!((m[i] - acc * amp).norm() < 1e-14);
        }
    }

    #[test]
    fn observation_sampling() {
        let model = GaussianObsModel::new(CVector::from_element(1, Complex64::new(0.0, 0.0)), 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 200_000;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut sq = 0.0;
        for i in 0..n {
            let s = sample_observation(&model, i, &mut rng);
            sum += s.y[0];
            sq += s.y[0].norm_sqr();
        }
        let se = (1.0 / n as f64).sqrt();
        assert!((sum / n as f64).norm() < 4.0 * se);
        assert!((sq / n as f64 - 1.0).abs() < 4.0 * se);

        let m = GaussianObsModel::new(CVector::from_element(2, Complex64::new(1.0, 2.0)), 3.0).unwrap();
        assert_eq!(ObservationSnapshot::noiseless(&m, 4).y, *m.mean());
        assert!(GaussianObsModel::new(CVector::zeros(2), 0.0).is_err());
    }

    #[test]
    fn likelihood_examples() {
        let m = GaussianObsModel::new(CVector::from_element(1, Complex64::new(0.5, -0.5)), 1.0).unwrap();
        assert!((log_likelihood(m.mean(), &m).unwrap() + PI.ln()).abs() < 1e-15);
        let cov = 2.5;
        let m2 = GaussianObsModel::new(CVector::from_element(1, Complex64::new(0.0, 0.0)), cov).unwrap();
        let y = CVector::from_element(1, Complex64::new(cov.sqrt(), 0.0));
        assert!((log_likelihood(&y, &m2).unwrap() - (-(PI * cov).ln() - 1.0)).abs() < 1e-14);
        assert!(log_likelihood(&CVector::zeros(2), &m2).is_err());
    }

    #[test]
    fn likelihood_random_instance_vs_direct_sum() {
        let mean = CVector::from_vec(vec![
            Complex64::new(0.3, -1.2),
            Complex64::new(-0.7, 0.1),
            Complex64::new(2.0, 0.5),
        ]);
        let model = GaussianObsModel::new(mean.clone(), 0.8).unwrap();
        let y = CVector::from_vec(vec![
            Complex64::new(1.0, 1.0),
            Complex64::new(0.0, -0.4),
            Complex64::new(1.1, 0.9),
        ]);
        let mut resid = 0.0;
        for i in 0..3 {
            let dr = y[i].re - mean[i].re;
            let di = y[i].im - mean[i].im;
            resid += dr * dr + di * di;
        }
        let want = -3.0 * (PI * 0.8).ln() - resid / 0.8;
        assert!((log_likelihood(&y, &model).unwrap() - want).abs() < 1e-13);
    }

    #[test]
    fn density_integrates_to_one() {
        // N_B = 1: integrate exp(ln f) over a square grid in the complex plane
        let model = GaussianObsModel::new(CVector::from_element(1, Complex64::new(0.4, -0.3)), 0.7).unwrap();
        let half = 6.0;
        let n = 1200;
        let h = 2.0 * half / n as f64;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let re = 0.4 - half + (i as f64 + 0.5) * h;
                let im = -0.3 - half + (j as f64 + 0.5) * h;
                let y = CVector::from_element(1, Complex64::new(re, im));
                total += log_likelihood(&y, &model).unwrap().exp() * h * h;
            }
        }
        assert!((total - 1.0).abs() < 1e-4, "{total}");
    }

    #[test]
    fn equal_covariance_llr_is_affine_in_y() {
        let m0 = GaussianObsModel::new(CVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]), 1.3).unwrap();
        let m1 = GaussianObsModel::new(CVector::from_vec(vec![Complex64::new(-0.5, 0.2), Complex64::new(0.4, 0.0)]), 1.3).unwrap();
        let llr = |y: &CVector| log_likelihood(y, &m1).unwrap() - log_likelihood(y, &m0).unwrap();
        let a = CVector::from_vec(vec![Complex64::new(0.3, 0.7), Complex64::new(-1.0, 0.2)]);
        let b = CVector::from_vec(vec![Complex64::new(2.0, -0.1), Complex64::new(0.5, 0.5)]);
        let mix = &a * Complex64::new(0.25, 0.0) + &b * Complex64::new(0.75, 0.0);
        let lhs = llr(&mix);
        let rhs = 0.25 * llr(&a) + 0.75 * llr(&b);
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
