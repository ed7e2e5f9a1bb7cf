//! The spoofer's optimal strategy.
//!
//! For a fixed true position the attacker picks the transmit power that makes
//! its covariance equal to the legitimate one, then the beamformer that
//! steers its mean as close as possible to the legitimate mean. What is left
//! of the KL divergence depends only on the bearing through `|r₁†r₀|²`:
//!
//! ```text
//! D(θ₁) = p₀g(d₀)K₀N₀ / (p₀g(d₀) + σ₀²(1+K₀)) · (N_B − |r₁†r₀|²/N_B)
//! ```

use std::f64::consts::PI;

use nalgebra::Complex;
use num_complex::Complex64;

use crate::channel::{cov_scalar, los_matrix, mean_vector, ChannelParams, GaussianObsModel, KFactor};
use crate::geometry::{
    correlation_mag_sq, dirichlet_sq, normalize_angle, path_loss, steering_rx, steering_tx,
    steering_tx_ula, ArrayGeometry, ArrayKind, PolarPoint,
};
use crate::linalg::{check_len, norm_sq, CMatrix, CVector};
use crate::search;
use crate::{Error, Result};

/// K₁ below this is treated as a Rayleigh attacker channel, for which no
/// finite antenna count reaches the unconstrained optimum.
pub const K1_FLOOR: f64 = 1e-6;

/// Grid size for the bearing search.
pub const THETA_GRID: usize = 100_000;
pub const THETA_TOL: f64 = 1e-10;

/// Bearings the attacker cannot use, e.g. because a building blocks LOS.
/// Endpoints are normalized; `lo > hi` wraps through ±π. The endpoints
/// themselves stay available.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleInterval {
    lo: f64,
    hi: f64,
}

impl AngleInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self {
            lo: normalize_angle(lo),
            hi: normalize_angle(hi),
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = normalize_angle(theta);
        if self.lo <= self.hi {
            t > self.lo && t < self.hi
        } else {
            t > self.lo || t < self.hi
        }
    }
}

/// Everything the LVS and the attacker know about one verification instance.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub bs: ArrayGeometry,
    pub veh_legit: ArrayGeometry,
    pub veh_mal: ArrayGeometry,
    /// Claimed location; equals the legitimate vehicle's true location.
    pub claimed: PolarPoint,
    pub legit_chan: ChannelParams,
    /// K₁ and σ₁²; the transmit power field is ignored because the attacker
    /// sets its own.
    pub mal_chan: ChannelParams,
    pub r_l: f64,
    pub forbidden: Vec<AngleInterval>,
    /// Legitimate array orientation ψ₀.
    pub psi0: f64,
    /// Attacker array orientation (ψ₁ for a ULA, φ₁ for a UCA).
    pub psi1: f64,
    /// Fixed attacker distance; `None` picks one from `r_l`.
    pub d1: Option<f64>,
}

impl Scenario {
    pub fn new(
        bs: ArrayGeometry,
        veh_legit: ArrayGeometry,
        veh_mal: ArrayGeometry,
        claimed: PolarPoint,
        legit_chan: ChannelParams,
        mal_chan: ChannelParams,
        r_l: f64,
    ) -> Result<Self> {
        if bs.kind() != ArrayKind::Ula {
            return Err(Error::InvalidGeometry("the BS array must be a ULA".into()));
        }
        if veh_legit.kind() != ArrayKind::Ula {
            return Err(Error::InvalidGeometry("the legitimate vehicle array must be a ULA".into()));
        }
        if !(r_l > 0.0) {
            return Err(Error::InvalidParameter(format!("r_l must be positive, got {r_l}")));
        }
        Ok(Self {
            bs,
            veh_legit,
            veh_mal,
            claimed,
            legit_chan,
            mal_chan,
            r_l,
            forbidden: Vec::new(),
            psi0: PI / 2.0,
            psi1: PI / 2.0,
            d1: None,
        })
    }

    pub fn with_forbidden(mut self, forbidden: Vec<AngleInterval>) -> Self {
        self.forbidden = forbidden;
        self
    }

    /// Copy with a different claimed location and legitimate channel.
    pub fn at_slot(&self, claimed: PolarPoint, legit_chan: ChannelParams) -> Self {
        Self {
            claimed,
            legit_chan,
            ..self.clone()
        }
    }

    pub fn with_attacker_array(&self, veh_mal: ArrayGeometry) -> Self {
        Self {
            veh_mal,
            ..self.clone()
        }
    }

    pub fn is_forbidden(&self, theta: f64) -> bool {
        self.forbidden.iter().any(|iv| iv.contains(theta))
    }

    /// `p₀ g(d₀)`.
    pub fn legit_received_power(&self) -> Result<f64> {
        self.legit_chan.received_power(self.claimed.d())
    }

    /// `m₀ = a·r₀`; returns `a² = p₀g(d₀)K₀N₀/(1+K₀)`.
    pub fn legit_amplitude_sq(&self) -> Result<f64> {
        Ok(self.legit_received_power()?
            * self.legit_chan.k_factor.los_fraction()
            * self.veh_legit.n() as f64)
    }

    pub fn legit_cov(&self) -> Result<f64> {
        cov_scalar(&self.legit_chan, self.claimed.d())
    }

    /// `a²/cov₀`, the factor in front of `N_B − |r₁†r₀|²/N_B`.
    pub fn kl_scale(&self) -> Result<f64> {
        Ok(self.legit_amplitude_sq()? / self.legit_cov()?)
    }

    /// The legitimate observation model, built from the full channel pipeline
    /// with `b₀ = t₀†/‖t₀‖`.
    pub fn legit_model(&self) -> Result<GaussianObsModel> {
        let t0 = steering_tx_ula(self.psi0, &self.veh_legit)?;
        let los = los_matrix(self.claimed.theta(), &t0, &self.bs)?;
        let b0 = t0.adjoint() / Complex64::new(t0.norm(), 0.0);
        let m0 = mean_vector(&self.legit_chan, self.claimed.d(), &los, &b0)?;
        GaussianObsModel::new(m0, self.legit_cov()?)
    }

    /// The mean the optimal attacker produces at bearing θ₁,
    /// `m₁* = √(a²)·r₁·(r₁†r₀)/N_B`.
    pub fn target_mean(&self, theta1: f64) -> Result<CVector> {
        let a = self.legit_amplitude_sq()?.sqrt();
        let r0 = steering_rx(self.claimed.theta(), &self.bs)?;
        let r1 = steering_rx(theta1, &self.bs)?;
        let proj = r1.dotc(&r0) * (a / self.bs.n() as f64);
        Ok(r1 * proj)
    }

    /// `(H₀, H₁)` models the LVS tests between when it expects the optimal
    /// attack from bearing θ₁. A perfect attack uses `m₁ = m₀` exactly so the
    /// statistic is identically zero.
    pub fn lvs_models(&self, theta1: f64) -> Result<(GaussianObsModel, GaussianObsModel)> {
        let h0 = self.legit_model()?;
        let m1 = if min_kl_at(self, theta1)? < crate::detector::PERFECT_ATTACK_KL {
            h0.mean().clone()
        } else {
            self.target_mean(theta1)?
        };
        let h1 = GaussianObsModel::new(m1, h0.cov_scalar())?;
        Ok((h0, h1))
    }

    /// Distance along bearing θ₁ the attacker uses when the scenario does not
    /// fix one via `d1`: the point on the ray closest to `d_c` that keeps the
    /// attacker at least `r_l` from the claimed location (ties go outward).
    pub fn default_attack_distance(&self, theta1: f64) -> f64 {
        if let Some(d1) = self.d1 {
            return d1;
        }
        ray_distance_outside_disc(theta1, &self.claimed, self.r_l, self.claimed.d())
    }
}

/// Point on the ray at bearing `theta` that lies outside the disc of radius
/// `r` around `centre` and is closest to `target` distance from the origin.
pub(crate) fn ray_distance_outside_disc(theta: f64, centre: &PolarPoint, r: f64, target: f64) -> f64 {
    match ray_disc_crossing(theta, centre, r) {
        Some((s_in, s_out)) if target > s_in && target < s_out => {
            let outward = s_out + 1e-9;
            if s_in > 1e-9 && target - s_in < s_out - target - 1e-9 * s_out {
                (s_in - 1e-9).max(1e-9)
            } else {
                outward
            }
        }
        _ => target,
    }
}

/// Parameters `s` along the ray `s·(cos θ, sin θ)`, `s ∈ ℝ`, where the line
/// enters and leaves the disc.
pub(crate) fn ray_disc_crossing(theta: f64, centre: &PolarPoint, r: f64) -> Option<(f64, f64)> {
    let (cx, cy) = centre.to_cartesian();
    let (ux, uy) = (theta.cos(), theta.sin());
    let b = ux * cx + uy * cy;
    let c = cx * cx + cy * cy - r * r;
    let disc = b * b - c;
    if disc <= 0.0 {
        return None;
    }
    let root = disc.sqrt();
    Some((b - root, b + root))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackPlan {
    pub theta1_star: f64,
    pub d1: f64,
    pub p1_star: f64,
    pub b1_star: CVector,
    pub n1_star: usize,
    pub min_kl: f64,
}

impl AttackPlan {
    /// Optimal plan at the best allowed bearing.
    pub fn optimal(scn: &Scenario) -> Result<Self> {
        let theta1 = optimal_theta(scn)?;
        Self::at(scn, theta1, scn.default_attack_distance(theta1))
    }

    /// Optimal power and beamformer for a given position.
    pub fn at(scn: &Scenario, theta1: f64, d1: f64) -> Result<Self> {
        let n1_star = min_antennas(scn)?;
        let p1_star = optimal_power(scn, d1)?;
        let b1_star = optimal_beamformer(scn, d1, theta1, scn.psi1)?;
        Ok(Self {
            theta1_star: normalize_angle(theta1),
            d1,
            p1_star,
            b1_star,
            n1_star,
            min_kl: min_kl_at(scn, theta1)?,
        })
    }

    /// The observation model this plan induces under H₁.
    pub fn model(&self, scn: &Scenario) -> Result<GaussianObsModel> {
        attacker_model(scn, self.d1, self.theta1_star, scn.psi1, self.p1_star, &self.b1_star)
    }
}

/// `p₁* = (K₁+1)/g(d₁)·(p₀g(d₀)/(1+K₀) + σ₀² − σ₁²)`, which equalizes the two
/// covariance matrices.
pub fn optimal_power(scn: &Scenario, d1: f64) -> Result<f64> {
    let slack = covariance_slack(scn)?;
    let k1 = match scn.mal_chan.k_factor {
        KFactor::Linear(k) => k,
        KFactor::PureLos => {
            return Err(Error::InfeasibleAttack(
                "a pure-LOS attacker channel has no diffuse power to match R0".into(),
            ))
        }
    };
    Ok((k1 + 1.0) / path_loss(d1, &scn.mal_chan.path)? * slack)
}

/// `p₀g(d₀)/(1+K₀) + σ₀² − σ₁²`, positive when the attack is feasible.
fn covariance_slack(scn: &Scenario) -> Result<f64> {
    let slack = scn.legit_cov()? - scn.mal_chan.noise_var;
    if !(slack > 0.0) {
        return Err(Error::InfeasibleAttack(format!(
            "attacker noise variance {} is not below the legitimate covariance {}",
            scn.mal_chan.noise_var,
            scn.legit_cov()?
        )));
    }
    Ok(slack)
}

/// `N₁* = ⌈max{2, p₀g(d₀)K₀N₀ / (K₁[p₀g(d₀) + (1+K₀)(σ₀² − σ₁²)])}⌉`.
pub fn min_antennas(scn: &Scenario) -> Result<usize> {
    let slack = covariance_slack(scn)?;
    let k1 = scn.mal_chan.k_factor;
    if k1.value() < K1_FLOOR {
        return Err(Error::UnboundedAntennas { k1: k1.value() });
    }
    // numerator and denominator both divided by (1+K₀) so that K₀ = ∞ works
    let num = scn.legit_received_power()? * scn.legit_chan.k_factor.los_fraction() * scn.veh_legit.n() as f64;
    let ratio = match k1 {
        KFactor::PureLos => 0.0,
        KFactor::Linear(k) => num / (k * slack),
    };
    Ok(ceil_tolerant(ratio.max(2.0)))
}

/// Ceiling that treats values within 1e−9 relative of an integer as that
/// integer, so rounding noise in exact-integer ratios does not add an antenna.
fn ceil_tolerant(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn attacker_los(scn: &Scenario, theta1: f64, psi1: f64) -> Result<CMatrix> {
    let t1 = steering_tx(psi1, &scn.veh_mal)?;
    los_matrix(theta1, &t1, &scn.bs)
}

/// `G = √(p₁g(d₁)K₁/(1+K₁))·H̄₁`.
fn gain_matrix(scn: &Scenario, d1: f64, theta1: f64, psi1: f64, p1: f64) -> Result<CMatrix> {
    let los = attacker_los(scn, theta1, psi1)?;
    let amp = (p1 * path_loss(d1, &scn.mal_chan.path)? * scn.mal_chan.k_factor.los_fraction()).sqrt();
    Ok(los * Complex64::new(amp, 0.0))
}

/// Principal direction of `Q = G†G`, its eigenvalue η, and `c₁ = u₁†G†m₀`.
struct Principal {
    u: CVector,
    eta: f64,
    c1: Complex64,
}

fn principal(g: &CMatrix, m0: &CVector) -> Principal {
    let q = g.adjoint() * g;
    // the eigensolver's stopping rule is absolute, so work at unit scale
    let scale = q.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Principal {
            u: CVector::zeros(g.ncols()),
            eta: 0.0,
            c1: Complex64::new(0.0, 0.0),
        };
    }
    let eig = (q / Complex64::new(scale, 0.0)).symmetric_eigen();
    let (idx, lam) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    let u: CVector = eig.eigenvectors.column(idx).into_owned();
    let c1 = u.dotc(&(g.adjoint() * m0));
    Principal { u, eta: lam * scale, c1 }
}

/// Unit vector orthogonal to `u`, by Gram-Schmidt from the second standard
/// basis vector (the first one if that is parallel to `u`).
fn orthogonal_unit(u: &CVector) -> CVector {
    let n = u.len();
    for k in [1usize, 0] {
        if k >= n {
            continue;
        }
        let mut e = CVector::zeros(n);
        e[k] = Complex::new(1.0, 0.0);
        let w = &e - u * u.dotc(&e);
        let norm = w.norm();
        if norm > 1e-8 {
            return w / Complex64::new(norm, 0.0);
        }
    }
    CVector::zeros(n)
}

fn assemble(u: &CVector, coef: Complex64) -> CVector {
    let mag = coef.norm();
    let coef = if mag > 1.0 { coef / mag } else { coef };
    let rest = (1.0 - coef.norm_sqr()).max(0.0).sqrt();
    let b = u * coef + orthogonal_unit(u) * Complex64::new(rest, 0.0);
    let n = b.norm();
    b / Complex64::new(n, 0.0)
}

/// KL-minimizing beamformer `b₁* = U p*` at power `p₁*`.
pub fn optimal_beamformer(scn: &Scenario, d1: f64, theta1: f64, psi1: f64) -> Result<CVector> {
    let n1_star = min_antennas(scn)?;
    let n1 = scn.veh_mal.n();
    if n1 < n1_star {
        return Err(Error::ConstrainedRegime { n1, n1_star });
    }
    let p1 = optimal_power(scn, d1)?;
    let g = gain_matrix(scn, d1, theta1, psi1, p1)?;
    let m0 = scn.legit_model()?;
    let pr = principal(&g, m0.mean());
    Ok(assemble(&pr.u, pr.c1 / pr.eta))
}

/// Best beamformer at an arbitrary power when the principal coefficient may
/// exceed one: the coefficient is clamped to the unit circle with the phase
/// of `c₁`.
pub fn constrained_beamformer(scn: &Scenario, d1: f64, theta1: f64, psi1: f64, p1: f64) -> Result<CVector> {
    let n1 = scn.veh_mal.n();
    if n1 < 2 {
        return Err(Error::InvalidParameter("the attacker needs at least two antennas".into()));
    }
    if !(p1 >= 0.0) {
        return Err(Error::InvalidParameter(format!("power must be >= 0, got {p1}")));
    }
    let g = gain_matrix(scn, d1, theta1, psi1, p1)?;
    let m0 = scn.legit_model()?;
    let pr = principal(&g, m0.mean());
    if !(pr.eta > 0.0) {
        let mut e = CVector::zeros(n1);
        e[0] = Complex::new(1.0, 0.0);
        return Ok(e);
    }
    Ok(assemble(&pr.u, pr.c1 / pr.eta))
}

/// H₁ model for an arbitrary attacker power and beamformer.
pub fn attacker_model(
    scn: &Scenario,
    d1: f64,
    theta1: f64,
    psi1: f64,
    p1: f64,
    b1: &CVector,
) -> Result<GaussianObsModel> {
    let chan = ChannelParams {
        tx_power: p1,
        ..scn.mal_chan.clone()
    };
    let los = attacker_los(scn, theta1, psi1)?;
    let m1 = mean_vector(&chan, d1, &los, b1)?;
    GaussianObsModel::new(m1, cov_scalar(&chan, d1)?)
}

/// `D(f₁ ‖ f₀)` for scalar-covariance complex Gaussians:
/// `N(ρ − 1 − ln ρ) + ‖m₀ − m₁‖²/cov₀`, `ρ = cov₁/cov₀`.
pub fn kl_divergence(null_model: &GaussianObsModel, alt_model: &GaussianObsModel) -> Result<f64> {
    check_len(null_model.dim(), alt_model.dim())?;
    let n = null_model.dim() as f64;
    let rho = alt_model.cov_scalar() / null_model.cov_scalar();
    let cov_term = n * (rho - 1.0 - rho.ln());
    let mean_term = norm_sq(&(null_model.mean() - alt_model.mean())) / null_model.cov_scalar();
    Ok((cov_term + mean_term).max(0.0))
}

/// Closed-form minimum KL divergence at bearing θ₁.
pub fn min_kl_at(scn: &Scenario, theta1: f64) -> Result<f64> {
    let nb = scn.bs.n() as f64;
    let corr = correlation_mag_sq(scn.claimed.theta(), theta1, &scn.bs)?;
    Ok((scn.kl_scale()? * (nb - corr / nb)).max(0.0))
}

/// Bearing that maximizes `|r₁†r₀|²` among the allowed angles. `±θ_c` are
/// tried first, so an unobstructed attacker lands on them exactly.
pub fn optimal_theta(scn: &Scenario) -> Result<f64> {
    let theta_c = scn.claimed.theta();
    let mut preferred = vec![theta_c, normalize_angle(-theta_c)];
    for iv in &scn.forbidden {
        preferred.push(iv.lo());
        preferred.push(iv.hi());
    }
    let nb = scn.bs.n();
    let tau = scn.bs.tau();
    let c0 = theta_c.cos();
    let best = search::maximize(
        &[(-PI, PI)],
        &preferred,
        THETA_GRID,
        THETA_TOL,
        |t| dirichlet_sq(nb, tau * (c0 - t.cos())),
        |t| !scn.is_forbidden(t),
    )
    .ok_or_else(|| Error::InfeasibleAttack("every bearing is forbidden".into()))?;
    Ok(normalize_angle(best.x))
}

/// Outcome of the attacker's best response when it has fewer than `N₁*`
/// antennas.
#[derive(Debug, Clone)]
pub struct ConstrainedAttack {
    pub p1: f64,
    pub b1: CVector,
    pub kl: f64,
}

/// Jointly optimizes power and the clamped beamformer for `N₁ < N₁*`.
/// The power is searched on a log grid spanning three decades either side
/// of `p₁*`.
pub fn constrained_attack(scn: &Scenario, d1: f64, theta1: f64, psi1: f64) -> Result<ConstrainedAttack> {
    let p_ref = optimal_power(scn, d1)?;
    let null_model = scn.legit_model()?;
    let kl_at = |log_p: f64| -> f64 {
        let p1 = p_ref * 10f64.powf(log_p);
        constrained_beamformer(scn, d1, theta1, psi1, p1)
            .and_then(|b| attacker_model(scn, d1, theta1, psi1, p1, &b))
            .and_then(|m| kl_divergence(&null_model, &m))
            .unwrap_or(f64::INFINITY)
    };
    let best = search::maximize(&[(-3.0, 3.0)], &[0.0], 600, 1e-10, |x| -kl_at(x), |_| true)
        .ok_or_else(|| Error::InfeasibleAttack("no finite KL on the power grid".into()))?;
    let p1 = p_ref * 10f64.powf(best.x);
    let b1 = constrained_beamformer(scn, d1, theta1, psi1, p1)?;
    Ok(ConstrainedAttack { p1, b1, kl: -best.value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PathLossParams;
    use crate::units::db_to_linear;
    use approx::assert_relative_eq;

    fn path() -> PathLossParams {
        PathLossParams::new(1.0, 3.0, 5.9e9).unwrap()
    }

    /// p₀g(d₀) = −75 dB, σ₀² = −85 dB, K₀ = 0 dB, K₁ = −5 dB, N₀ = 3.
    fn antenna_scenario(k1_db: f64, noise1_db: f64, n1: usize) -> Scenario {
        let d0 = 50.0;
        let legit = ChannelParams::with_received_power(
            KFactor::from_db(0.0).unwrap(),
            db_to_linear(-85.0),
            db_to_linear(-75.0),
            d0,
            path(),
        )
        .unwrap();
        let mal = ChannelParams::new(KFactor::from_db(k1_db).unwrap(), db_to_linear(noise1_db), 0.0, path()).unwrap();
        Scenario::new(
            ArrayGeometry::ula_with_tau(4, PI).unwrap(),
            ArrayGeometry::ula_with_tau(3, PI).unwrap(),
            ArrayGeometry::ula_with_tau(n1, PI).unwrap(),
            PolarPoint::new(d0, PI / 3.0).unwrap(),
            legit,
            mal,
            20.0,
        )
        .unwrap()
    }

    #[test]
    fn angle_interval_membership() {
        let iv = AngleInterval::new(0.2, 0.5);
        assert!(iv.contains(0.3));
        assert!(!iv.contains(0.2) && !iv.contains(0.5) && !iv.contains(0.6));
        let wrap = AngleInterval::new(3.0, -3.0);
        assert!(wrap.contains(PI) && wrap.contains(-3.1) && !wrap.contains(0.0));
    }

    #[test]
    fn power_matches_covariance() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        let d1 = 80.0;
        let p1 = optimal_power(&s, d1).unwrap();
        let chan = ChannelParams { tx_power: p1, ..s.mal_chan.clone() };
        let c1 = cov_scalar(&chan, d1).unwrap();
        assert_relative_eq!(c1, s.legit_cov().unwrap(), max_relative = 4.0 * f64::EPSILON);
    }

    #[test]
    fn power_symmetric_case() {
        let mut s = antenna_scenario(0.0, -85.0, 12);
        s.mal_chan.k_factor = s.legit_chan.k_factor;
        let p1 = optimal_power(&s, s.claimed.d()).unwrap();
        assert_relative_eq!(p1, s.legit_chan.tx_power, max_relative = 1e-12);
    }

    #[test]
    fn power_fig_params() {
        // p₁*/p₀ = (1 + 10^−0.5)/2 at d₁ = d₀, from mpmath at 30 digits
        let s = antenna_scenario(-5.0, -85.0, 12);
        let p1 = optimal_power(&s, s.claimed.d()).unwrap();
        assert_relative_eq!(p1 / s.legit_chan.tx_power, 0.658_113_883_008_419, max_relative = 1e-13);
    }

    #[test]
    fn power_boundary_and_infeasible() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        let limit = s.legit_cov().unwrap();
        let mut near = s.clone();
        near.mal_chan.noise_var = limit * (1.0 - 1e-9);
        let p = optimal_power(&near, 50.0).unwrap();
        assert!(p > 0.0 && p < 1e-6 * optimal_power(&s, 50.0).unwrap());
        let mut bad = s.clone();
        bad.mal_chan.noise_var = limit * 1.01;
        assert!(matches!(optimal_power(&bad, 50.0), Err(Error::InfeasibleAttack(_))));
        assert!(matches!(min_antennas(&bad), Err(Error::InfeasibleAttack(_))));
    }

    #[test]
    fn antenna_examples() {
        assert_eq!(min_antennas(&antenna_scenario(-5.0, -85.0, 12)).unwrap(), 10);
        assert_eq!(min_antennas(&antenna_scenario(20.0, -85.0, 12)).unwrap(), 2);
        let tiny = antenna_scenario(-70.0, -85.0, 12);
        assert!(matches!(min_antennas(&tiny), Err(Error::UnboundedAntennas { .. })));
        let mut zero = antenna_scenario(-5.0, -85.0, 12);
        zero.mal_chan.k_factor = KFactor::Linear(0.0);
        assert!(matches!(min_antennas(&zero), Err(Error::UnboundedAntennas { .. })));
    }

    #[test]
    fn tolerant_ceiling() {
        assert_eq!(ceil_tolerant(3.000_000_000_000_000_4), 3);
        assert_eq!(ceil_tolerant(3.000_001), 4);
        assert_eq!(ceil_tolerant(9.487), 10);
    }

    #[test]
    fn beamformer_hits_target_mean() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        for theta1 in [PI / 3.0, 0.9, -2.0, 2.5] {
            let d1 = 70.0;
            let b = optimal_beamformer(&s, d1, theta1, s.psi1).unwrap();
            assert_relative_eq!(b.norm(), 1.0, epsilon = 1e-12);
            let p1 = optimal_power(&s, d1).unwrap();
            let m1 = attacker_model(&s, d1, theta1, s.psi1, p1, &b).unwrap();
            let target = s.target_mean(theta1).unwrap();
            let scale = target.norm().max(s.legit_model().unwrap().mean().norm());
            assert!((m1.mean() - &target).norm() <= 1e-9 * scale, "theta1 = {theta1}");
        }
        let perfect = {
            let b = optimal_beamformer(&s, 90.0, -s.claimed.theta(), s.psi1).unwrap();
            let p1 = optimal_power(&s, 90.0).unwrap();
            attacker_model(&s, 90.0, -s.claimed.theta(), s.psi1, p1, &b).unwrap()
        };
        let m0 = s.legit_model().unwrap();
        assert!((perfect.mean() - m0.mean()).norm() <= 1e-9 * m0.mean().norm());
    }

    #[test]
    fn beamformer_at_exact_antenna_bound() {
        // K₀N₀·p₀g/(K₁ p₀g) = 4/2 ... pick K₁ so that the ratio is exactly 4 = N₁
        let mut s = antenna_scenario(0.0, -85.0, 4);
        s.veh_legit = ArrayGeometry::ula_with_tau(4, PI).unwrap();
        s.mal_chan.noise_var = s.legit_chan.noise_var;
        // ratio = p₀gK₀N₀/(K₁ p₀g) = N₀ when K₀ = K₁ = 1
        assert_eq!(min_antennas(&s).unwrap(), 4);
        let d1 = 60.0;
        let theta = s.claimed.theta();
        let b = optimal_beamformer(&s, d1, theta, s.psi1).unwrap();
        let t1 = steering_tx(s.psi1, &s.veh_mal).unwrap();
        let dir = t1.adjoint() / Complex64::new(t1.norm(), 0.0);
        assert_relative_eq!(dir.dotc(&b).norm(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn constrained_regime_is_signalled() {
        let s = antenna_scenario(-5.0, -85.0, 9);
        assert!(matches!(
            optimal_beamformer(&s, 50.0, PI / 3.0, s.psi1),
            Err(Error::ConstrainedRegime { n1: 9, n1_star: 10 })
        ));
    }

    #[test]
    fn constrained_matches_unconstrained_when_inactive() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        let d1 = 55.0;
        let theta1 = 1.4;
        let p1 = optimal_power(&s, d1).unwrap();
        let a = optimal_beamformer(&s, d1, theta1, s.psi1).unwrap();
        let b = constrained_beamformer(&s, d1, theta1, s.psi1, p1).unwrap();
        let ma = attacker_model(&s, d1, theta1, s.psi1, p1, &a).unwrap();
        let mb = attacker_model(&s, d1, theta1, s.psi1, p1, &b).unwrap();
        assert!((ma.mean() - mb.mean()).norm() < 1e-12 * ma.mean().norm().max(1e-30));
    }

    #[test]
    fn constrained_active_gives_unit_coefficient_and_worse_kl() {
        let s = antenna_scenario(-5.0, -85.0, 9);
        let d1 = 50.0;
        let theta1 = s.claimed.theta();
        let p1 = optimal_power(&s, d1).unwrap();
        let b = constrained_beamformer(&s, d1, theta1, s.psi1, p1).unwrap();
        let t1 = steering_tx(s.psi1, &s.veh_mal).unwrap();
        let dir = t1.adjoint() / Complex64::new(t1.norm(), 0.0);
        assert_relative_eq!(dir.dotc(&b).norm(), 1.0, epsilon = 1e-9);
        let m1 = attacker_model(&s, d1, theta1, s.psi1, p1, &b).unwrap();
        let kl = kl_divergence(&s.legit_model().unwrap(), &m1).unwrap();
        assert!(kl > min_kl_at(&s, theta1).unwrap() + 1e-6);
        let best = constrained_attack(&s, d1, theta1, s.psi1).unwrap();
        assert!(best.kl <= kl + 1e-12);
        assert!(best.kl > min_kl_at(&s, theta1).unwrap());
    }

    #[test]
    fn kl_examples() {
        let m = GaussianObsModel::new(CVector::from_element(2, Complex64::new(0.3, 0.1)), 1.5).unwrap();
        assert_eq!(kl_divergence(&m, &m).unwrap(), 0.0);
        let wide = GaussianObsModel::new(m.mean().clone(), 3.0).unwrap();
        assert_relative_eq!(kl_divergence(&m, &wide).unwrap(), 2.0 * (1.0 - 2f64.ln()), epsilon = 1e-15);
        assert_relative_eq!(kl_divergence(&m, &wide).unwrap(), 0.613_705_638_880_109_4, epsilon = 1e-15);
        let mut shifted = m.mean().clone();
        shifted[0] += Complex64::new(1.5f64.sqrt(), 0.0);
        let sm = GaussianObsModel::new(shifted, 1.5).unwrap();
        assert_relative_eq!(kl_divergence(&m, &sm).unwrap(), 1.0, epsilon = 1e-14);
        let three = GaussianObsModel::new(CVector::zeros(3), 1.0).unwrap();
        assert!(kl_divergence(&m, &three).is_err());
    }

    #[test]
    fn min_kl_examples() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        assert!(min_kl_at(&s, s.claimed.theta()).unwrap() <= 1e-12);
        assert!(min_kl_at(&s, -s.claimed.theta()).unwrap() <= 1e-12);
        let mut rayleigh = s.clone();
        rayleigh.legit_chan.k_factor = KFactor::Linear(0.0);
        for t in [0.1, 1.0, 2.0, -2.5] {
            assert_eq!(min_kl_at(&rayleigh, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn pure_los_legit_channel() {
        let mut s = antenna_scenario(-5.0, -85.0, 12);
        s.legit_chan.k_factor = KFactor::PureLos;
        // with no diffuse legitimate power the attacker needs a quieter receiver
        s.mal_chan.noise_var = s.legit_chan.noise_var / 10.0;
        let pg = s.legit_received_power().unwrap();
        let want = pg * 3.0 / s.legit_chan.noise_var;
        assert_relative_eq!(s.kl_scale().unwrap(), want, max_relative = 1e-12);
        assert!(min_antennas(&s).unwrap() >= 2);
    }

    #[test]
    fn theta_search_prefers_claimed_bearing() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        assert_eq!(optimal_theta(&s).unwrap(), s.claimed.theta());
        let blocked = s.clone().with_forbidden(vec![
            AngleInterval::new(0.8, 1.3),
            AngleInterval::new(-1.3, -0.8),
        ]);
        let t = optimal_theta(&blocked).unwrap();
        assert!(!blocked.is_forbidden(t));
        let brute = (0..200_001)
            .map(|i| -PI + 2.0 * PI * i as f64 / 200_000.0)
            .filter(|t| !blocked.is_forbidden(*t))
            .map(|t| correlation_mag_sq(s.claimed.theta(), t, &s.bs).unwrap())
            .fold(0.0, f64::max);
        assert!(correlation_mag_sq(s.claimed.theta(), t, &s.bs).unwrap() >= brute - 1e-9);
        let all = s.clone().with_forbidden(vec![AngleInterval::new(-PI + 1e-3, PI - 1e-3), AngleInterval::new(PI - 2e-3, -PI + 2e-3)]);
        assert!(optimal_theta(&all).is_err());
    }

    #[test]
    fn default_distance_respects_r_l() {
        let s = antenna_scenario(-5.0, -85.0, 12);
        for theta in [s.claimed.theta(), 1.0, 1.1, -0.5, 2.9] {
            let d1 = s.default_attack_distance(theta);
            let p = PolarPoint::new(d1, theta).unwrap();
            assert!(p.distance_to(&s.claimed) >= s.r_l, "theta {theta}");
        }
        assert_relative_eq!(
            s.default_attack_distance(s.claimed.theta()),
            s.claimed.d() + s.r_l,
            epsilon = 1e-6
        );
    }

    #[test]
    fn plan_is_consistent() {
        let s = antenna_scenario(0.0, -85.0, 12);
        let plan = AttackPlan::optimal(&s).unwrap();
        assert!(plan.n1_star >= 2);
        assert_relative_eq!(plan.b1_star.norm(), 1.0, epsilon = 1e-12);
        let kl = kl_divergence(&s.legit_model().unwrap(), &plan.model(&s).unwrap()).unwrap();
        assert!((kl - plan.min_kl).abs() < 1e-9);
        assert!(plan.min_kl <= 1e-12);
    }
}
