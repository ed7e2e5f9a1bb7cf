//! Monte Carlo validation of the analytic rates.
//!
//! Every trial draws from its own ChaCha stream keyed by the trial index, so
//! results do not depend on how rayon schedules the work.

use std::ops::RangeInclusive;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::attack::{AttackPlan, Scenario};
use crate::channel::{sample_observation, GaussianObsModel};
use crate::detector::{analytic_rates, total_error, DetectorConfig, RatePair};
use crate::geometry::PolarPoint;
use crate::linalg::CVector;
use crate::tracking::{constrained_attack_track, per_slot_kl, tracking_rates, AttackTrack, TrackMode, Trajectory};
use crate::{Error, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "LVS_SIM_THREADS";

const JITTER_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    /// Claimed-location error; per-axis Gaussian std is `jitter_std/√2`.
    pub jitter_std: f64,
    /// Inclusive range the tracking window length is drawn from.
    pub t_range: RangeInclusive<usize>,
}

impl TrialConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            jitter_std: 0.0,
            t_range: 1..=1,
        }
    }

    pub fn with_jitter(mut self, jitter_std: f64) -> Self {
        self.jitter_std = jitter_std;
        self
    }

    pub fn with_t_range(mut self, t_range: RangeInclusive<usize>) -> Self {
        self.t_range = t_range;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if !(self.jitter_std >= 0.0) {
            return Err(Error::InvalidParameter(format!("jitter_std must be >= 0, got {}", self.jitter_std)));
        }
        if self.t_range.is_empty() || *self.t_range.start() == 0 {
            return Err(Error::InvalidParameter(format!("bad window range {:?}", self.t_range)));
        }
        Ok(())
    }
}

/// `jitter_std` whose Rayleigh-distributed displacement has the given mean.
pub fn jitter_std_for_mean_error(mean_error: f64) -> f64 {
    mean_error * 2.0 / std::f64::consts::PI.sqrt()
}

/// Empirical rate with its binomial standard error and 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub rate: f64,
    pub se: f64,
    pub wilson: (f64, f64),
    pub hits: u64,
    pub trials: u64,
}

impl RateEstimate {
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let r = hits as f64 / n;
        let z = 1.959_963_984_540_054;
        let denom = 1.0 + z * z / n;
        let centre = (r + z * z / (2.0 * n)) / denom;
        let half = z * (r * (1.0 - r) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        Self {
            rate: r,
            se: (r * (1.0 - r) / n).sqrt(),
            wilson: ((centre - half).max(0.0), (centre + half).min(1.0)),
            hits,
            trials,
        }
    }

    /// `|rate − reference|` in units of the binomial SE at the reference.
    pub fn z_score(&self, reference: f64) -> f64 {
        let se = (reference * (1.0 - reference) / self.trials as f64).sqrt();
        if se == 0.0 {
            if (self.rate - reference).abs() <= f64::EPSILON {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.rate - reference).abs() / se
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalReport {
    pub alpha_hat: RateEstimate,
    pub beta_hat: RateEstimate,
    pub analytic: RatePair,
    pub total_error_hat: f64,
    pub runtime_ms: f64,
}

impl EmpiricalReport {
    fn new(alpha_hits: u64, beta_hits: u64, trials: u64, analytic: RatePair, p0_prior: f64, start: Instant) -> Self {
        let alpha_hat = RateEstimate::from_counts(alpha_hits, trials);
        let beta_hat = RateEstimate::from_counts(beta_hits, trials);
        let total_error_hat = total_error(
            RatePair {
                alpha: alpha_hat.rate,
                beta: beta_hat.rate,
            },
            p0_prior,
        );
        Self {
            alpha_hat,
            beta_hat,
            analytic,
            total_error_hat,
            runtime_ms: start.elapsed().as_secs_f64() * 1e3,
        }
    }

    /// Standard error of the empirical total error.
    pub fn total_error_se(&self, p0_prior: f64) -> f64 {
        (p0_prior.powi(2) * self.alpha_hat.se.powi(2) + (1.0 - p0_prior).powi(2) * self.beta_hat.se.powi(2)).sqrt()
    }
}

/// Independent stream for trial `index` within experiment `domain`.
pub fn trial_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(index);
    rng
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
            builder = builder.num_threads(n.max(1));
        }
        builder.build().expect("thread pool")
    })
}

/// Runs `f` over trial indices in parallel and sums the returned counts.
fn parallel_counts<F>(trials: usize, f: F) -> Result<(u64, u64)>
where
    F: Fn(u64) -> Result<(bool, bool)> + Sync,
{
    pool().install(|| {
        (0..trials as u64)
            .into_par_iter()
            .map(|i| f(i).map(|(a, b)| (a as u64, b as u64)))
            .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
    })
}

const DOMAIN_SINGLE: u64 = 1;
const DOMAIN_TRACK: u64 = 2;

/// Models used in a single-slot run: the legitimate one, the one the optimal
/// attacker actually induces, and the alternative the LVS tests against.
struct SingleSlotModels {
    h0: GaussianObsModel,
    attacker: GaussianObsModel,
    lvs_alt: CVector,
}

fn single_slot_models(scn: &Scenario, theta1: f64) -> Result<SingleSlotModels> {
    let (h0, h1) = scn.lvs_models(theta1)?;
    let plan = AttackPlan::at(scn, theta1, scn.default_attack_distance(theta1))?;
    let attacker = plan.model(scn)?;
    Ok(SingleSlotModels {
        h0,
        attacker,
        lvs_alt: h1.mean().clone(),
    })
}

/// Statistic offsets `(𝕋(y₀) − c, 𝕋(y₁) − c)` where `Γ = ln λ + c`.
fn single_slot_samples<R: Rng>(m: &SingleSlotModels, rng: &mut R) -> Result<(f64, f64)> {
    let y0 = sample_observation(&m.h0, 0, rng).y;
    let y1 = sample_observation(&m.attacker, 0, rng).y;
    let cov = m.h0.cov_scalar();
    let t0 = crate::detector::test_statistic(&y0, m.h0.mean(), &m.lvs_alt, cov)?;
    let t1 = crate::detector::test_statistic(&y1, m.h0.mean(), &m.lvs_alt, cov)?;
    Ok((t0, t1))
}

/// Empirical α̂, β̂ of the single-snapshot LRT against the optimal attack
/// at bearing θ₁.
pub fn run_single_slot(scn: &Scenario, theta1: f64, det: &DetectorConfig, cfg: &TrialConfig) -> Result<EmpiricalReport> {
    Ok(run_roc(scn, theta1, &[det.lambda()], det.p0_prior(), cfg)?.remove(0))
}

/// One report per threshold; every threshold sees the same samples.
pub fn run_roc(
    scn: &Scenario,
    theta1: f64,
    lambdas: &[f64],
    p0_prior: f64,
    cfg: &TrialConfig,
) -> Result<Vec<EmpiricalReport>> {
    cfg.validate()?;
    let start = Instant::now();
    let models = single_slot_models(scn, theta1)?;
    let base = crate::detector::threshold_gamma(1.0, models.h0.mean(), &models.lvs_alt, models.h0.cov_scalar())?;
    let samples: Vec<(f64, f64)> = pool().install(|| {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|i| single_slot_samples(&models, &mut trial_rng(cfg.seed, DOMAIN_SINGLE, i)))
            .collect::<Result<Vec<_>>>()
    })?;
    lambdas
        .iter()
        .map(|&lambda| {
            let gamma = lambda.ln() + base;
            let a = samples.iter().filter(|s| s.0 >= gamma).count() as u64;
            let b = samples.iter().filter(|s| s.1 >= gamma).count() as u64;
            let analytic = analytic_rates(scn, theta1, lambda)?;
            Ok(EmpiricalReport::new(a, b, cfg.trials as u64, analytic, p0_prior, start))
        })
        .collect()
}

/// Per-axis Gaussian displacement with std `jitter_std/√2`; draws that land
/// on the base station are redrawn.
pub fn apply_jitter<R: Rng + ?Sized>(claimed: PolarPoint, jitter_std: f64, rng: &mut R) -> Result<PolarPoint> {
    if !(jitter_std >= 0.0) {
        return Err(Error::InvalidParameter(format!("jitter_std must be >= 0, got {jitter_std}")));
    }
    if jitter_std == 0.0 {
        return Ok(claimed);
    }
    let axis = Normal::new(0.0, jitter_std / std::f64::consts::SQRT_2)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let (x, y) = claimed.to_cartesian();
    for _ in 0..JITTER_RETRIES {
        let p = PolarPoint::from_cartesian(x + axis.sample(rng), y + axis.sample(rng));
        if let Ok(p) = p {
            return Ok(p);
        }
    }
    Err(Error::Domain("jittered position kept landing on the base station".into()))
}

/// Per-slot means and covariances the LVS uses for a known track.
struct TrackModels {
    m0: Vec<CVector>,
    m1: Vec<CVector>,
    cov: Vec<f64>,
    /// `Re{(m₁−m₀)†(m₁+m₀)}/cov₀` per slot.
    offset: Vec<f64>,
}

impl TrackModels {
    fn build(track: &AttackTrack, traj: &Trajectory, scn: &Scenario) -> Result<Self> {
        let models = track.slot_models(traj, scn)?;
        let mut out = Self {
            m0: Vec::new(),
            m1: Vec::new(),
            cov: Vec::new(),
            offset: Vec::new(),
        };
        for (h0, h1) in models {
            out.offset
                .push(crate::detector::threshold_gamma(1.0, h0.mean(), h1.mean(), h0.cov_scalar())?);
            out.cov.push(h0.cov_scalar());
            out.m0.push(h0.mean().clone());
            out.m1.push(h1.mean().clone());
        }
        Ok(out)
    }

    /// Tracking decision over the first `t` slots for observations `ys`.
    fn malicious(&self, ys: &[CVector], t: usize, lambda: f64) -> Result<bool> {
        let stat = crate::tracking::tracking_test_statistic(&ys[..t], &self.m0[..t], &self.m1[..t], &self.cov[..t])?;
        let gamma = lambda.ln() + self.offset[..t].iter().sum::<f64>();
        Ok(stat >= gamma)
    }
}

/// Empirical rates of the tracking LVS.
///
/// Each trial draws the window length `T` uniformly from `cfg.t_range`.
/// With jitter the LVS sees perturbed claims in every slot, rebuilds the
/// expected attack track from them, and tests observations generated at the
/// true positions; the attacker's own claims are exact.
pub fn run_tracking(
    traj: &Trajectory,
    scn: &Scenario,
    r_u: f64,
    mode: TrackMode,
    det: &DetectorConfig,
    cfg: &TrialConfig,
) -> Result<EmpiricalReport> {
    cfg.validate()?;
    let t_max = *cfg.t_range.end();
    if t_max > traj.len() {
        return Err(Error::InvalidParameter(format!(
            "window up to {t_max} slots but the trajectory has {}",
            traj.len()
        )));
    }
    let start = Instant::now();
    let traj = traj.truncated(t_max)?;
    let track = constrained_attack_track(&traj, scn, r_u, mode)?;
    let truth = TrackModels::build(&track, &traj, scn)?;
    let attacker: Vec<GaussianObsModel> = track
        .points
        .iter()
        .enumerate()
        .map(|(t, p)| p.plan.model(&traj.slot_scenario(scn, t)))
        .collect::<Result<_>>()?;
    let legit: Vec<GaussianObsModel> = (0..traj.len())
        .map(|t| traj.slot_scenario(scn, t).legit_model())
        .collect::<Result<_>>()?;

    let kls = per_slot_kl(&track, &traj, scn)?;
    let windows: Vec<usize> = cfg.t_range.clone().collect();
    let mut analytic = RatePair { alpha: 0.0, beta: 0.0 };
    for &t in &windows {
        let r = tracking_rates(kls[..t].iter().sum(), det.lambda());
        analytic.alpha += r.alpha / windows.len() as f64;
        analytic.beta += r.beta / windows.len() as f64;
    }

    let lambda = det.lambda();
    let (a, b) = parallel_counts(cfg.trials, |i| {
        let mut rng = trial_rng(cfg.seed, DOMAIN_TRACK, i);
        let t = rng.random_range(cfg.t_range.clone());
        let y0: Vec<CVector> = legit[..t].iter().map(|m| sample_observation(m, 0, &mut rng).y).collect();
        let y1: Vec<CVector> = attacker[..t].iter().map(|m| sample_observation(m, 0, &mut rng).y).collect();
        let fp = if cfg.jitter_std > 0.0 {
            let claims = traj.slots()[..t]
                .iter()
                .map(|s| apply_jitter(s.claimed, cfg.jitter_std, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            let seen = traj.truncated(t)?.with_claims(&claims)?;
            let seen_track = constrained_attack_track(&seen, scn, r_u, mode)?;
            TrackModels::build(&seen_track, &seen, scn)?.malicious(&y0, t, lambda)?
        } else {
            truth.malicious(&y0, t, lambda)?
        };
        let det = truth.malicious(&y1, t, lambda)?;
        Ok((fp, det))
    })?;
    Ok(EmpiricalReport::new(a, b, cfg.trials as u64, analytic, det.p0_prior(), start))
}

/// Named parameter axes; the last axis varies fastest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Grid {
    axes: Vec<(String, Vec<f64>)>,
}

impl Grid {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn axis(mut self, name: impl Into<String>, values: Vec<f64>) -> Self {
        self.axes.push((name.into(), values));
        self
    }

    pub fn len(&self) -> usize {
        if self.axes.is_empty() {
            0
        } else {
            self.axes.iter().map(|a| a.1.len()).product()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn names(&self) -> Vec<String> {
        self.axes.iter().map(|a| a.0.clone()).collect()
    }

    /// All grid points in row order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for (_, values) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// Header plus rows of numbers, written as CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.header.len() {
            return Err(Error::LengthMismatch {
                left: self.header.len(),
                right: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    /// Floats use the shortest round-trip form, switching to exponent
    /// notation for very large or small magnitudes; NaN marks a value that
    /// was not computed and is written as an empty cell.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_float(v)))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn format_float(v: f64) -> String {
    if v.is_nan() {
        return String::new();
    }
    let s = format!("{v:?}");
    match s.strip_suffix(".0") {
        Some(int) => int.to_string(),
        None => s,
    }
}

/// Evaluates every grid point; the evaluator returns the non-grid columns.
pub fn sweep<F>(grid: &Grid, columns: &[&str], evaluator: F) -> Result<Table>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty parameter grid".into()));
    }
    let mut header = grid.names();
    header.extend(columns.iter().map(|c| c.to_string()));
    let mut table = Table::new(header);
    for p in grid.points() {
        let mut row = p.clone();
        row.extend(evaluator(&p)?);
        table.push(row)?;
    }
    Ok(table)
}
