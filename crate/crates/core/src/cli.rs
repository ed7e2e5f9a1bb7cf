//! Named experiments and the command-line front end.
//!
//! Precedence, lowest first: config file, `--set key=value`, then the
//! dedicated `--seed` and `--trials` flags. With `--trials 0` only the
//! analytic columns are filled and the Monte Carlo columns are empty.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::Parser;

use crate::attack::{min_antennas, min_kl_at, optimal_theta, AttackPlan, Scenario};
use crate::channel::KFactor;
use crate::config::{parse_config, parse_override, Experiment, ExperimentConfig, PowerSpec};
use crate::detector::{bayes_threshold, rates_from_divergence, total_error, DetectorConfig};
use crate::geometry::{correlation_mag_sq, steering_rx, PolarPoint};
use crate::montecarlo::{jitter_std_for_mean_error, run_roc, run_single_slot, run_tracking, sweep, Grid, Table, TrialConfig};
use crate::tracking::{constrained_attack_track, per_slot_kl, Trajectory};
use crate::units::{db_to_linear, linear_to_db};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "lvs-sim", version, about = "Location verification simulator")]
pub struct Cli {
    /// roc, kl-map, total-error-grid, min-antennas-grid, track or correlation
    #[arg(value_parser = parse_experiment)]
    pub experiment: Experiment,
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

fn parse_experiment(s: &str) -> std::result::Result<Experiment, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        e if e.is_infeasible() => EXIT_INFEASIBLE,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Loads the config named on the command line with all overrides applied.
pub fn load(cli: &Cli) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(&cli.config)?;
    let overrides = cli.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>>>()?;
    let mut cfg = parse_config(&text, &overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = cli.trials {
        cfg.trials = trials;
    }
    Ok(cfg)
}

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = load(cli)?;
    let table = run_experiment(cli.experiment, &cfg)?;
    match &cli.out {
        Some(path) => table.write_csv(fs::File::create(path)?),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write_csv(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

/// Parses arguments, runs, prints any error and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        // a closed downstream pipe (e.g. `| head`) is not a failure
        Err(e) if is_broken_pipe(&e) => EXIT_OK,
        Err(e) => {
            eprintln!("lvs-sim: {e}");
            exit_code(&e)
        }
    }
}

fn is_broken_pipe(err: &Error) -> bool {
    let io = match err {
        Error::Io(e) => e,
        Error::Csv(e) => match e.kind() {
            csv::ErrorKind::Io(e) => e,
            _ => return false,
        },
        _ => return false,
    };
    io.kind() == std::io::ErrorKind::BrokenPipe
}

pub fn run_experiment(experiment: Experiment, cfg: &ExperimentConfig) -> Result<Table> {
    match experiment {
        Experiment::Roc => roc(cfg),
        Experiment::KlMap => kl_map(cfg),
        Experiment::TotalErrorGrid => total_error_grid(cfg),
        Experiment::MinAntennasGrid => min_antennas_grid(cfg),
        Experiment::Track => track(cfg),
        Experiment::Correlation => correlation(cfg),
    }
}

fn lambda_or_bayes(cfg: &ExperimentConfig) -> Result<f64> {
    match cfg.lambda {
        Some(l) => Ok(l),
        None => bayes_threshold(cfg.p0_prior),
    }
}

fn detector_theta(cfg: &ExperimentConfig, scn: &Scenario) -> Result<f64> {
    match cfg.scenario.theta1 {
        Some(t) => Ok(t),
        None => optimal_theta(scn),
    }
}

fn trial_config(cfg: &ExperimentConfig) -> TrialConfig {
    TrialConfig::new(cfg.trials, cfg.seed)
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn lin_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Analytic and empirical ROC for every (SNR, θ₁) combination.
fn roc(cfg: &ExperimentConfig) -> Result<Table> {
    let mut table = Table::new(header(&[
        "snr_db",
        "theta1_over_pi",
        "lambda",
        "min_kl",
        "alpha_analytic",
        "beta_analytic",
        "alpha_mc",
        "beta_mc",
        "alpha_se",
        "beta_se",
    ]));
    let snrs: Vec<Option<f64>> = if cfg.roc.snr_db.is_empty() {
        vec![None]
    } else {
        cfg.roc.snr_db.iter().map(|s| Some(*s)).collect()
    };
    let lambdas = log_space(cfg.roc.lambda_min, cfg.roc.lambda_max, cfg.roc.points);
    for snr in snrs {
        let mut spec = cfg.scenario.clone();
        if let Some(s) = snr {
            spec.power = PowerSpec::Snr(db_to_linear(s));
        }
        let scn = spec.build()?;
        let snr_db = match snr {
            Some(s) => s,
            None => linear_to_db(scn.legit_received_power()? / scn.legit_chan.noise_var),
        };
        let thetas: Vec<f64> = if cfg.roc.theta1_over_pi.is_empty() {
            vec![detector_theta(cfg, &scn)?]
        } else {
            cfg.roc.theta1_over_pi.iter().map(|t| t * PI).collect()
        };
        for theta1 in thetas {
            // the closed-form KL presumes the attack is realizable
            AttackPlan::at(&scn, theta1, scn.default_attack_distance(theta1))?;
            let d = min_kl_at(&scn, theta1)?;
            let mc = if cfg.trials > 0 {
                Some(run_roc(&scn, theta1, &lambdas, cfg.p0_prior, &trial_config(cfg))?)
            } else {
                None
            };
            for (i, &lambda) in lambdas.iter().enumerate() {
                let r = rates_from_divergence(d, lambda);
                let (am, bm, ase, bse) = match &mc {
                    Some(reports) => {
                        let rep = &reports[i];
                        (rep.alpha_hat.rate, rep.beta_hat.rate, rep.alpha_hat.se, rep.beta_hat.se)
                    }
                    None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
                };
                table.push(vec![snr_db, theta1 / PI, lambda, d, r.alpha, r.beta, am, bm, ase, bse])?;
            }
        }
    }
    Ok(table)
}

/// Minimum KL divergence over a grid of candidate attacker positions.
fn kl_map(cfg: &ExperimentConfig) -> Result<Table> {
    let scn = cfg.scenario.build()?;
    let s = &cfg.kl_map;
    let grid = Grid::new()
        .axis("x", lin_space(s.x_range.0, s.x_range.1, s.points))
        .axis("y", lin_space(s.y_range.0, s.y_range.1, s.points));
    sweep(&grid, &["d", "theta_over_pi", "correlation", "min_kl", "feasible"], |p| {
        let Ok(pos) = PolarPoint::from_cartesian(p[0], p[1]) else {
            return Ok(vec![0.0, f64::NAN, f64::NAN, f64::NAN, 0.0]);
        };
        let theta = pos.theta();
        let feasible = pos.distance_to(&scn.claimed) >= scn.r_l && !scn.is_forbidden(theta);
        Ok(vec![
            pos.d(),
            theta / PI,
            correlation_mag_sq(scn.claimed.theta(), theta, &scn.bs)?,
            min_kl_at(&scn, theta)?,
            if feasible { 1.0 } else { 0.0 },
        ])
    })
}

/// `|r₁†r₀|²` in closed form and by direct product, with the KL factor.
fn correlation(cfg: &ExperimentConfig) -> Result<Table> {
    let s = &cfg.correlation;
    let grid = Grid::new()
        .axis("n_b", s.n_b.iter().map(|&n| n as f64).collect())
        .axis("theta1_over_pi", lin_space(s.theta_over_pi.0, s.theta_over_pi.1, s.points));
    let theta0 = cfg.scenario.theta0;
    sweep(&grid, &["correlation", "correlation_direct", "kl_factor"], |p| {
        let n = p[0] as usize;
        let bs = crate::geometry::ArrayGeometry::ula_with_tau(n, cfg.scenario.bs_tau)?;
        let theta1 = p[1] * PI;
        let closed = correlation_mag_sq(theta0, theta1, &bs)?;
        let direct = steering_rx(theta1, &bs)?.dotc(&steering_rx(theta0, &bs)?).norm_sqr();
        Ok(vec![closed, direct, n as f64 - closed / n as f64])
    })
}

/// Minimum total error at the Bayes threshold over `N_B × N₀ × K₀`.
fn total_error_grid(cfg: &ExperimentConfig) -> Result<Table> {
    let g = &cfg.total_error_grid;
    let grid = Grid::new()
        .axis("n_b", g.n_b.iter().map(|&n| n as f64).collect())
        .axis("n0", g.n0.iter().map(|&n| n as f64).collect())
        .axis("k0_db", g.k0_db.clone());
    let lambda = lambda_or_bayes(cfg)?;
    sweep(&grid, &["min_kl", "total_error_analytic", "total_error_mc", "total_error_se"], |p| {
        let mut spec = cfg.scenario.clone();
        spec.bs_n = p[0] as usize;
        spec.legit_n = p[1] as usize;
        spec.k0 = KFactor::from_db(p[2])?;
        let scn = spec.build()?;
        let d = min_kl_at(&scn, g.theta1)?;
        let eps = total_error(rates_from_divergence(d, lambda), cfg.p0_prior);
        let (mc, se) = if cfg.trials > 0 {
            // give the attacker enough antennas for the unconstrained optimum
            let n1 = scn.veh_mal.n().max(min_antennas(&scn)?);
            let scn = scn.with_attacker_array(scn.veh_mal.with_elements(n1)?);
            let det = DetectorConfig::new(lambda, cfg.p0_prior)?;
            let rep = run_single_slot(&scn, g.theta1, &det, &trial_config(cfg))?;
            (rep.total_error_hat, rep.total_error_se(cfg.p0_prior))
        } else {
            (f64::NAN, f64::NAN)
        };
        Ok(vec![d, eps, mc, se])
    })
}

/// `N₁*` over `K₁ × σ₁²`; empty cells where it is unbounded or the attack
/// is infeasible.
fn min_antennas_grid(cfg: &ExperimentConfig) -> Result<Table> {
    let g = &cfg.min_antennas_grid;
    let grid = Grid::new().axis("k1_db", g.k1_db.clone()).axis("sigma1_db", g.sigma1_db.clone());
    sweep(&grid, &["n1_star"], |p| {
        let mut spec = cfg.scenario.clone();
        spec.k1 = KFactor::from_db(p[0])?;
        spec.sigma1 = db_to_linear(p[1]);
        let scn = spec.build()?;
        match min_antennas(&scn) {
            Ok(n) => Ok(vec![n as f64]),
            Err(e) if e.is_infeasible() => Ok(vec![f64::NAN]),
            Err(e) => Err(e),
        }
    })
}

/// Tracking rates for each window length `T`.
fn track(cfg: &ExperimentConfig) -> Result<Table> {
    let t = &cfg.track;
    let scn = cfg.scenario.build()?;
    let mut traj = Trajectory::new(scn.claimed, t.heading, t.speed_mps, t.dt, t.slots, &scn.legit_chan)?;
    if let Some(map) = &t.k0_db_map {
        let ks = map.iter().map(|k| KFactor::from_db(*k)).collect::<Result<Vec<_>>>()?;
        traj = traj.with_k_map(&ks)?;
    }
    let track = constrained_attack_track(&traj, &scn, t.r_u, t.mode)?;
    let kls = per_slot_kl(&track, &traj, &scn)?;
    let lambda = lambda_or_bayes(cfg)?;
    let det = DetectorConfig::new(lambda, cfg.p0_prior)?;
    let mut table = Table::new(header(&[
        "t",
        "d_track",
        "alpha_analytic",
        "beta_analytic",
        "total_error_analytic",
        "alpha_mc",
        "beta_mc",
        "alpha_se",
        "beta_se",
        "total_error_mc",
        "attacker_x",
        "attacker_y",
    ]));
    for window in t.t_min..=t.t_max {
        let d: f64 = kls[..window].iter().sum();
        let r = rates_from_divergence(d, lambda);
        let eps = total_error(r, cfg.p0_prior);
        let mc = if cfg.trials > 0 {
            let tc = trial_config(cfg)
                .with_t_range(window..=window)
                .with_jitter(jitter_std_for_mean_error(t.jitter_mean));
            let rep = run_tracking(&traj, &scn, t.r_u, t.mode, &det, &tc)?;
            [rep.alpha_hat.rate, rep.beta_hat.rate, rep.alpha_hat.se, rep.beta_hat.se, rep.total_error_hat]
        } else {
            [f64::NAN; 5]
        };
        let (x, y) = track.points[window - 1].position.to_cartesian();
        let mut row = vec![window as f64, d, r.alpha, r.beta, eps];
        row.extend(mc);
        row.extend([x, y]);
        table.push(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_helpers() {
        let l = log_space(1e-2, 1e2, 5);
        assert!((l[2] - 1.0).abs() < 1e-12);
        assert_eq!(lin_space(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(log_space(2.0, 9.0, 1), vec![2.0]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(exit_code(&Error::InfeasibleAttack("x".into())), EXIT_INFEASIBLE);
        assert_eq!(exit_code(&Error::Io(std::io::Error::other("x"))), EXIT_IO);
        assert_eq!(exit_code(&Error::InvalidPrior(2.0)), EXIT_CONFIG);
    }
}
