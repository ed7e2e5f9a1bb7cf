//! Single-snapshot likelihood ratio test.
//!
//! With equal covariances the log-likelihood ratio is affine in `y`, so the
//! test reduces to comparing `𝕋(y) = 2Re{(m₁−m₀)†y}/cov₀` against
//! `Γ = ln λ + Re{(m₁−m₀)†(m₁+m₀)}/cov₀`.

use crate::attack::{min_kl_at, Scenario};
use crate::linalg::{check_len, CVector};
use crate::{Error, Result};

/// Divergences below this are treated as a perfect attack.
pub const PERFECT_ATTACK_KL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Legitimate,
    Malicious,
}

impl Decision {
    pub fn is_malicious(self) -> bool {
        self == Decision::Malicious
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    lambda: f64,
    p0_prior: f64,
}

impl DetectorConfig {
    pub fn new(lambda: f64, p0_prior: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
        }
        bayes_threshold(p0_prior)?;
        Ok(Self { lambda, p0_prior })
    }

    /// Detector running at the Bayes threshold for the given prior.
    pub fn bayes(p0_prior: f64) -> Result<Self> {
        Self::new(bayes_threshold(p0_prior)?, p0_prior)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn p0_prior(&self) -> f64 {
        self.p0_prior
    }
}

/// False positive rate α and detection rate β.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatePair {
    pub alpha: f64,
    pub beta: f64,
}

/// Standard normal tail probability.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

fn check_dims(y: &CVector, m0: &CVector, m1: &CVector, cov0: f64) -> Result<()> {
    check_len(m0.len(), y.len())?;
    check_len(m0.len(), m1.len())?;
    if !(cov0 > 0.0) {
        return Err(Error::InvalidParameter(format!("covariance must be positive, got {cov0}")));
    }
    Ok(())
}

pub fn test_statistic(y: &CVector, m0: &CVector, m1: &CVector, cov0: f64) -> Result<f64> {
    check_dims(y, m0, m1, cov0)?;
    Ok(2.0 * (m1 - m0).dotc(y).re / cov0)
}

pub fn threshold_gamma(lambda: f64, m0: &CVector, m1: &CVector, cov0: f64) -> Result<f64> {
    check_dims(m0, m0, m1, cov0)?;
    Ok(lambda.ln() + (m1 - m0).dotc(&(m1 + m0)).re / cov0)
}

/// Malicious iff `𝕋(y) ≥ Γ`. When `m₁ = m₀` both sides are exact and the
/// decision collapses to `ln λ ≤ 0`.
pub fn decide(y: &CVector, m0: &CVector, m1: &CVector, cov0: f64, lambda: f64) -> Result<Decision> {
    let t = test_statistic(y, m0, m1, cov0)?;
    let gamma = threshold_gamma(lambda, m0, m1, cov0)?;
    Ok(if t >= gamma { Decision::Malicious } else { Decision::Legitimate })
}

/// Rates as a function of the divergence between the hypotheses.
pub fn rates_from_divergence(d: f64, lambda: f64) -> RatePair {
    let ln_l = lambda.ln();
    if d < PERFECT_ATTACK_KL {
        let v = if -ln_l >= 0.0 { 1.0 } else { 0.0 };
        return RatePair { alpha: v, beta: v };
    }
    let s = (2.0 * d).sqrt();
    RatePair {
        alpha: q_function((ln_l + d) / s),
        beta: q_function((ln_l - d) / s),
    }
}

/// Rates for a detector tuned to the optimal attack at bearing θ₁.
pub fn analytic_rates(scn: &Scenario, theta1: f64, lambda: f64) -> Result<RatePair> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Ok(rates_from_divergence(min_kl_at(scn, theta1)?, lambda))
}

/// `P₀α + (1−P₀)(1−β)`.
pub fn total_error(rates: RatePair, p0_prior: f64) -> f64 {
    (p0_prior * rates.alpha + (1.0 - p0_prior) * (1.0 - rates.beta)).clamp(0.0, 1.0)
}

/// `λ* = P₀/(1−P₀)`.
pub fn bayes_threshold(p0_prior: f64) -> Result<f64> {
    if !(p0_prior > 0.0 && p0_prior < 1.0) {
        return Err(Error::InvalidPrior(p0_prior));
    }
    Ok(p0_prior / (1.0 - p0_prior))
}

/// Total error at the Bayes threshold for divergence `d`.
pub fn min_total_error(d: f64, p0_prior: f64) -> Result<f64> {
    let lambda = bayes_threshold(p0_prior)?;
    Ok(total_error(rates_from_divergence(d, lambda), p0_prior))
}
