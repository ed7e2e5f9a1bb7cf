//! Physical-layer location verification for vehicular networks over Rician
//! fading channels.
//!
//! A base station with a uniform linear array checks whether a vehicle's
//! claimed position agrees with the signal it receives. The crate models the
//! channel, derives the spoofer's KL-divergence-minimizing transmit power,
//! beamformer and position, builds the likelihood-ratio detector that
//! counters it, extends both sides to multi-slot tracking, and checks every
//! closed-form error rate by Monte Carlo.
//!
//! Module map:
//!
//! - [`geometry`]: polar positions, steering vectors, path loss, array correlation
//! - [`channel`]: Rician channel draws, observation model, Gaussian likelihood
//! - [`attack`]: optimal power, beamformer, antenna bound and attack angle
//! - [`detector`]: test statistic, thresholds, analytic rates, total error
//! - [`tracking`]: trajectories, constrained attack tracks, tracking LRT
//! - [`montecarlo`]: seeded parallel simulation, ROC and parameter sweeps
//! - [`config`] and [`cli`]: scenario files, named experiments, CSV output

// `!(x > 0.0)` is deliberate: it rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attack;
pub mod channel;
pub mod cli;
pub mod config;
pub mod detector;
mod error;
pub mod geometry;
pub mod linalg;
pub mod montecarlo;
mod search;
pub mod tracking;
pub mod units;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::attack::{
        kl_divergence, min_antennas, min_kl_at, optimal_beamformer, optimal_power, optimal_theta,
        AngleInterval, AttackPlan, Scenario,
    };
    pub use crate::channel::{ChannelParams, GaussianObsModel, KFactor, ObservationSnapshot};
    pub use crate::detector::{
        analytic_rates, bayes_threshold, decide, q_function, total_error, Decision, DetectorConfig,
        RatePair,
    };
    pub use crate::geometry::{ArrayGeometry, ArrayKind, PathLossParams, PolarPoint};
    pub use crate::montecarlo::{EmpiricalReport, TrialConfig};
    pub use crate::tracking::{AttackTrack, Heading, Trajectory, TrackMode};
    pub use crate::units::{db_to_linear, linear_to_db};
    pub use crate::{Error, Result};
}
