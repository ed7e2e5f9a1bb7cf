//! Multi-slot verification of a moving vehicle.
//!
//! The attacker must keep at least `r_l` from every claimed point and can move
//! at most `r_u` per slot, so it cannot sit on the claimed bearing forever.
//! KL divergence is additive over independent slots, which is where the
//! tracking gain comes from.

use std::f64::consts::PI;

use crate::attack::{ray_disc_crossing, AttackPlan, Scenario};
use crate::channel::{ChannelParams, GaussianObsModel, KFactor};
use crate::detector::{rates_from_divergence, test_statistic, threshold_gamma, Decision, RatePair};
use crate::geometry::{correlation_mag_sq, dirichlet_sq, normalize_angle, PolarPoint};
use crate::linalg::CVector;
use crate::search;
use crate::{Error, Result};

/// Margin by which emitted positions clear the distance constraints, so
/// they still hold after the polar round trip.
const CONSTRAINT_MARGIN: f64 = 1e-9;

const FIRST_SLOT_GRID: usize = 2_000;
const LATER_SLOT_GRID: usize = 2_000;
const SEARCH_TOL: f64 = 1e-10;

/// Direction of travel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Heading {
    /// Straight toward the base station.
    TowardBs,
    /// Fixed direction, counterclockwise from the x-axis.
    Angle(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackMode {
    /// Attacker confined to the vehicle's road.
    OnRoad,
    /// Attacker anywhere with an allowed LOS bearing.
    Free,
}

#[derive(Debug, Clone)]
pub struct TrajectorySlot {
    pub claimed: PolarPoint,
    pub legit_chan: ChannelParams,
}

/// Claimed positions of a vehicle moving at constant velocity along a
/// straight road `origin + s·direction`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    slots: Vec<TrajectorySlot>,
    dt: f64,
    speed: f64,
    origin: (f64, f64),
    direction: (f64, f64),
}

/// Radial approach toward the base station.
pub fn make_trajectory(
    start: PolarPoint,
    speed_mps: f64,
    dt: f64,
    slots: usize,
    legit_chan: &ChannelParams,
) -> Result<Trajectory> {
    Trajectory::new(start, Heading::TowardBs, speed_mps, dt, slots, legit_chan)
}

impl Trajectory {
    pub fn new(
        start: PolarPoint,
        heading: Heading,
        speed_mps: f64,
        dt: f64,
        slots: usize,
        legit_chan: &ChannelParams,
    ) -> Result<Self> {
        if slots == 0 {
            return Err(Error::InvalidParameter("a trajectory needs at least one slot".into()));
        }
        if !(speed_mps >= 0.0) || !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "need speed >= 0 and dt > 0, got {speed_mps} and {dt}"
            )));
        }
        let angle = match heading {
            Heading::TowardBs => start.theta() + PI,
            Heading::Angle(a) => a,
        };
        let direction = (angle.cos(), angle.sin());
        let origin = start.to_cartesian();
        let step = speed_mps * dt;
        let mut out = Vec::with_capacity(slots);
        for t in 0..slots {
            let s = step * t as f64;
            let claimed = match heading {
                // keep the bearing exact on a radial path
                Heading::TowardBs => {
                    let d = start.d() - s;
                    if d <= 0.0 {
                        return Err(Error::Domain(format!("slot {} reaches the base station", t + 1)));
                    }
                    PolarPoint::new(d, start.theta())?
                }
                Heading::Angle(_) => {
                    let (x, y) = (origin.0 + s * direction.0, origin.1 + s * direction.1);
                    PolarPoint::from_cartesian(x, y)
                        .map_err(|_| Error::Domain(format!("slot {} reaches the base station", t + 1)))?
                }
            };
            out.push(TrajectorySlot {
                claimed,
                legit_chan: legit_chan.clone(),
            });
        }
        Ok(Self {
            slots: out,
            dt,
            speed: speed_mps,
            origin,
            direction,
        })
    }

    /// Replaces the Rician factor slot by slot.
    pub fn with_k_map(mut self, k_map: &[KFactor]) -> Result<Self> {
        if k_map.len() != self.slots.len() {
            return Err(Error::LengthMismatch {
                left: self.slots.len(),
                right: k_map.len(),
            });
        }
        for (slot, k) in self.slots.iter_mut().zip(k_map) {
            slot.legit_chan.k_factor = *k;
        }
        Ok(self)
    }

    /// Same road and channels with different claimed points, e.g. after
    /// localization error.
    pub fn with_claims(&self, claims: &[PolarPoint]) -> Result<Self> {
        if claims.len() != self.slots.len() {
            return Err(Error::LengthMismatch {
                left: self.slots.len(),
                right: claims.len(),
            });
        }
        let mut out = self.clone();
        for (slot, c) in out.slots.iter_mut().zip(claims) {
            slot.claimed = *c;
        }
        Ok(out)
    }

    /// First `t` slots.
    pub fn truncated(&self, t: usize) -> Result<Self> {
        if t == 0 || t > self.slots.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate {} slots to {t}",
                self.slots.len()
            )));
        }
        let mut out = self.clone();
        out.slots.truncate(t);
        Ok(out)
    }

    pub fn slots(&self) -> &[TrajectorySlot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn road_point(&self, s: f64) -> (f64, f64) {
        (self.origin.0 + s * self.direction.0, self.origin.1 + s * self.direction.1)
    }

    fn road_param(&self, p: (f64, f64)) -> f64 {
        (p.0 - self.origin.0) * self.direction.0 + (p.1 - self.origin.1) * self.direction.1
    }

    /// Scenario seen by the LVS in slot `t` (zero-based).
    pub fn slot_scenario(&self, scn: &Scenario, t: usize) -> Scenario {
        let slot = &self.slots[t];
        scn.at_slot(slot.claimed, slot.legit_chan.clone())
    }
}

#[derive(Debug, Clone)]
pub struct TrackPoint {
    pub position: PolarPoint,
    pub plan: AttackPlan,
}

#[derive(Debug, Clone)]
pub struct AttackTrack {
    pub points: Vec<TrackPoint>,
    pub r_u: f64,
}

impl AttackTrack {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn bearings(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.position.theta()).collect()
    }

    /// Per-slot `(H₀, H₁)` models for the LVS that knows this track.
    pub fn slot_models(&self, traj: &Trajectory, scn: &Scenario) -> Result<Vec<(GaussianObsModel, GaussianObsModel)>> {
        check_lengths(self, traj)?;
        (0..traj.len())
            .map(|t| {
                traj.slot_scenario(scn, t).lvs_models(self.points[t].position.theta())
            })
            .collect()
    }
}

fn check_lengths(track: &AttackTrack, traj: &Trajectory) -> Result<()> {
    if track.len() != traj.len() {
        return Err(Error::LengthMismatch {
            left: track.len(),
            right: traj.len(),
        });
    }
    Ok(())
}

fn cart_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

/// Greedy per-slot attack: each slot maximizes `|r₁†r₀|²` subject to
/// `‖x_c(t) − x₁(t)‖ ≥ r_l` and `‖x₁(t−1) − x₁(t)‖ ≤ r_u`.
pub fn constrained_attack_track(traj: &Trajectory, scn: &Scenario, r_u: f64, mode: TrackMode) -> Result<AttackTrack> {
    if !(r_u >= 0.0) {
        return Err(Error::InvalidParameter(format!("r_u must be >= 0, got {r_u}")));
    }
    let mut points: Vec<TrackPoint> = Vec::with_capacity(traj.len());
    let mut prev: Option<(f64, f64)> = None;
    for t in 0..traj.len() {
        let slot_scn = traj.slot_scenario(scn, t);
        let pos = match mode {
            TrackMode::OnRoad => on_road_slot(traj, &slot_scn, prev, r_u),
            TrackMode::Free => free_slot(&slot_scn, prev, r_u),
        }
        .ok_or_else(|| Error::InfeasibleTrack {
            slot: t + 1,
            reason: "no position satisfies both distance constraints".into(),
        })?;
        let position = PolarPoint::from_cartesian(pos.0, pos.1)?;
        let plan = AttackPlan::at(&slot_scn, position.theta(), position.d())?;
        prev = Some(pos);
        points.push(TrackPoint { position, plan });
    }
    Ok(AttackTrack { points, r_u })
}

fn on_road_slot(traj: &Trajectory, scn: &Scenario, prev: Option<(f64, f64)>, r_u: f64) -> Option<(f64, f64)> {
    let xc = scn.claimed.to_cartesian();
    let (lo, hi) = match prev {
        Some(p) => {
            let s = traj.road_param(p);
            let slack = (r_u - CONSTRAINT_MARGIN).max(0.0);
            (s - slack, s + slack)
        }
        None => {
            let sc = traj.road_param(xc);
            let reach = (20.0 * scn.r_l).max(2_000.0);
            (sc - reach, sc + reach)
        }
    };
    // road parameters where the line is within r_l of the claimed point
    let rel = (traj.origin.0 - xc.0, traj.origin.1 - xc.1);
    let b = rel.0 * traj.direction.0 + rel.1 * traj.direction.1;
    let c = rel.0 * rel.0 + rel.1 * rel.1 - scn.r_l * scn.r_l;
    let disc = b * b - c;
    let mut intervals = Vec::new();
    if disc > 0.0 {
        let root = disc.sqrt();
        let (s_in, s_out) = (-b - root - CONSTRAINT_MARGIN, -b + root + CONSTRAINT_MARGIN);
        if lo <= s_in {
            intervals.push((lo, s_in.min(hi)));
        }
        if hi >= s_out {
            intervals.push((s_out.max(lo), hi));
        }
    } else {
        intervals.push((lo, hi));
    }
    if intervals.is_empty() {
        return None;
    }
    let theta_c = scn.claimed.theta();
    // Search over the angle α the point subtends from the road's foot point
    // at the BS. Bearing moves one-for-one with α, so a uniform α grid is
    // uniform in bearing. A road through the BS keeps the road parameter.
    let foot = -(traj.origin.0 * traj.direction.0 + traj.origin.1 * traj.direction.1);
    let (fx, fy) = traj.road_point(foot);
    let h = fx.hypot(fy);
    let angular = h > 1e-9 * (1.0 + foot.abs());
    let to_s = |a: f64| if angular { foot + h * a.tan() } else { a };
    let to_a = |s: f64| if angular { ((s - foot) / h).atan() } else { s };
    let intervals: Vec<(f64, f64)> = intervals.iter().map(|&(a, b)| (to_a(a), to_a(b))).collect();
    let mut preferred: Vec<f64> = Vec::new();
    if angular {
        // where the rays at ±θ_c cross the road
        let (ox, oy) = traj.origin;
        let (dx, dy) = traj.direction;
        for th in [theta_c, -theta_c] {
            let (c, sn) = (th.cos(), th.sin());
            let den = dx * sn - dy * c;
            if den.abs() > 1e-12 {
                let s_hit = (oy * c - ox * sn) / den;
                let (x, y) = traj.road_point(s_hit);
                if x * c + y * sn > 0.0 {
                    preferred.push(to_a(s_hit));
                }
            }
        }
    }
    preferred.extend(intervals.iter().flat_map(|&(a, b)| [a, b]));
    let (nb, tau, c0) = (scn.bs.n(), scn.bs.tau(), theta_c.cos());
    let objective = |a: f64| {
        let (x, y) = traj.road_point(to_s(a));
        dirichlet_sq(nb, tau * (c0 - x / x.hypot(y)))
    };
    let allowed = |a: f64| {
        let p = traj.road_point(to_s(a));
        p.0.hypot(p.1) > CONSTRAINT_MARGIN
            && cart_dist(p, xc) >= scn.r_l
            && (scn.forbidden.is_empty() || !scn.is_forbidden(p.1.atan2(p.0)))
            && prev.is_none_or(|q| cart_dist(p, q) <= r_u)
    };
    let grid = if prev.is_some() { LATER_SLOT_GRID } else { FIRST_SLOT_GRID };
    let best = search::maximize(
        &intervals,
        &preferred,
        grid,
        SEARCH_TOL,
        objective,
        allowed,
    )?;
    Some(traj.road_point(to_s(best.x)))
}

/// Free mode: best bearing among those reachable from the previous
/// position, then the feasible point on that ray closest to it.
fn free_slot(scn: &Scenario, prev: Option<(f64, f64)>, r_u: f64) -> Option<(f64, f64)> {
    let theta_c = scn.claimed.theta();
    let Some(p) = prev else {
        let theta = crate::attack::optimal_theta(scn).ok()?;
        let d = scn.default_attack_distance(theta);
        return Some((d * theta.cos(), d * theta.sin()));
    };
    let prev_pt = PolarPoint::from_cartesian(p.0, p.1).ok()?;
    let point_on = |theta: f64| ray_point(scn, &prev_pt, r_u, theta);
    let (centre, half) = if prev_pt.d() > r_u {
        (prev_pt.theta(), (r_u / prev_pt.d()).asin())
    } else {
        (0.0, PI)
    };
    let intervals = [(centre - half, centre + half)];
    let mut preferred = vec![prev_pt.theta()];
    for cand in [theta_c, -theta_c] {
        // express the candidate inside the window if it is reachable
        let delta = normalize_angle(cand - centre);
        if delta.abs() <= half {
            preferred.insert(0, centre + delta);
        }
    }
    let best = search::maximize(
        &intervals,
        &preferred,
        LATER_SLOT_GRID,
        SEARCH_TOL,
        |theta| correlation_mag_sq(theta_c, theta, &scn.bs).unwrap_or(f64::NEG_INFINITY),
        |theta| !scn.is_forbidden(theta) && point_on(theta).is_some(),
    )?;
    point_on(best.x)
}

/// Feasible point on the ray at `theta` closest to `prev`, or `None`.
fn ray_point(scn: &Scenario, prev: &PolarPoint, r_u: f64, theta: f64) -> Option<(f64, f64)> {
    let (a, b) = ray_disc_crossing(theta, prev, r_u)?;
    let (a, b) = ((a + CONSTRAINT_MARGIN).max(CONSTRAINT_MARGIN), b - CONSTRAINT_MARGIN);
    if a > b {
        return None;
    }
    let (ux, uy) = (theta.cos(), theta.sin());
    let (px, py) = prev.to_cartesian();
    let target = (px * ux + py * uy).clamp(a, b);
    let s = match ray_disc_crossing(theta, &scn.claimed, scn.r_l) {
        Some((s_in, s_out)) => {
            let (s_in, s_out) = (s_in - CONSTRAINT_MARGIN, s_out + CONSTRAINT_MARGIN);
            if target > s_in && target < s_out {
                let below = (s_in >= a).then_some(s_in);
                let above = (s_out <= b).then_some(s_out);
                match (below, above) {
                    (Some(lo), Some(hi)) => {
                        if target - lo < hi - target {
                            lo
                        } else {
                            hi
                        }
                    }
                    (Some(lo), None) => lo,
                    (None, Some(hi)) => hi,
                    (None, None) => return None,
                }
            } else {
                target
            }
        }
        None => target,
    };
    let pt = (s * ux, s * uy);
    let ok = cart_dist(pt, prev.to_cartesian()) <= r_u && cart_dist(pt, scn.claimed.to_cartesian()) >= scn.r_l;
    ok.then_some(pt)
}

/// `Σ_t D(θ₁(t))` with slot-`t` parameters.
pub fn track_kl(track: &AttackTrack, traj: &Trajectory, scn: &Scenario) -> Result<f64> {
    check_lengths(track, traj)?;
    Ok(per_slot_kl(track, traj, scn)?.iter().sum())
}

pub fn per_slot_kl(track: &AttackTrack, traj: &Trajectory, scn: &Scenario) -> Result<Vec<f64>> {
    check_lengths(track, traj)?;
    track.points.iter().enumerate().map(|(t, p)| p.plan_kl(traj, scn, t)).collect()
}

impl TrackPoint {
    fn plan_kl(&self, traj: &Trajectory, scn: &Scenario, t: usize) -> Result<f64> {
        crate::attack::min_kl_at(&traj.slot_scenario(scn, t), self.position.theta())
    }
}

pub fn tracking_rates(track_kl_value: f64, lambda_track: f64) -> RatePair {
    rates_from_divergence(track_kl_value, lambda_track)
}

fn check_slot_inputs(n: usize, lens: &[usize]) -> Result<()> {
    for &l in lens {
        if l != n {
            return Err(Error::LengthMismatch { left: n, right: l });
        }
    }
    Ok(())
}

/// Sum of per-slot statistics.
pub fn tracking_test_statistic(ys: &[CVector], means0: &[CVector], means1: &[CVector], cov0: &[f64]) -> Result<f64> {
    check_slot_inputs(ys.len(), &[means0.len(), means1.len(), cov0.len()])?;
    let mut acc = 0.0;
    for t in 0..ys.len() {
        acc += test_statistic(&ys[t], &means0[t], &means1[t], cov0[t])?;
    }
    Ok(acc)
}

/// `ln λ + Σ_t Re{(m₁−m₀)†(m₁+m₀)}/cov₀`.
pub fn tracking_threshold(lambda_track: f64, means0: &[CVector], means1: &[CVector], cov0: &[f64]) -> Result<f64> {
    check_slot_inputs(means0.len(), &[means1.len(), cov0.len()])?;
    let mut acc = lambda_track.ln();
    for t in 0..means0.len() {
        acc += threshold_gamma(1.0, &means0[t], &means1[t], cov0[t])?;
    }
    Ok(acc)
}

pub fn tracking_decide(
    ys: &[CVector],
    means0: &[CVector],
    means1: &[CVector],
    cov0: &[f64],
    lambda_track: f64,
) -> Result<Decision> {
    let t = tracking_test_statistic(ys, means0, means1, cov0)?;
    let gamma = tracking_threshold(lambda_track, means0, means1, cov0)?;
    Ok(if t >= gamma { Decision::Malicious } else { Decision::Legitimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ArrayGeometry, PathLossParams};
    use crate::units::{db_to_linear, kmh_to_mps};
    use approx::assert_relative_eq;

    fn chan() -> ChannelParams {
        ChannelParams::new(
            KFactor::from_db(-10.0).unwrap(),
            db_to_linear(-90.0),
            db_to_linear(30.0),
            PathLossParams::new(1.0, 3.0, 5.9e9).unwrap(),
        )
        .unwrap()
    }

    fn start() -> PolarPoint {
        PolarPoint::new(10.0 * 2f64.sqrt(), PI / 4.0).unwrap()
    }

    fn scenario() -> Scenario {
        Scenario::new(
            ArrayGeometry::ula_with_tau(3, PI).unwrap(),
            ArrayGeometry::ula_with_tau(2, PI).unwrap(),
            ArrayGeometry::ula_with_tau(8, PI).unwrap(),
            start(),
            chan(),
            chan(),
            100.0,
        )
        .unwrap()
    }

    #[test]
    fn trajectory_examples() {
        let v = kmh_to_mps(20.0);
        let still = make_trajectory(start(), 0.0, 0.1, 4, &chan()).unwrap();
        assert!(still.slots().iter().all(|s| s.claimed == start()));
        let two = make_trajectory(start(), v, 0.1, 2, &chan()).unwrap();
        assert_relative_eq!(two.slots()[1].claimed.d(), 10.0 * 2f64.sqrt() - 0.555_555_555_555_555_6, epsilon = 1e-12);
        assert_eq!(two.slots()[1].claimed.theta(), PI / 4.0);
        let one = make_trajectory(start(), v, 0.1, 1, &chan()).unwrap();
        assert_eq!(one.len(), 1);
        assert!(make_trajectory(start(), v, 0.1, 30, &chan()).is_err());
        let road = Trajectory::new(start(), Heading::Angle(PI), v, 0.1, 10, &chan()).unwrap();
        for w in road.slots().windows(2) {
            assert_relative_eq!(w[0].claimed.distance_to(&w[1].claimed), v * 0.1, epsilon = 1e-9);
        }
    }

    #[test]
    fn k_map_and_truncation() {
        let traj = make_trajectory(start(), 1.0, 0.1, 3, &chan()).unwrap();
        let ks = [KFactor::Linear(1.0), KFactor::Linear(2.0), KFactor::PureLos];
        let mapped = traj.clone().with_k_map(&ks).unwrap();
        assert_eq!(mapped.slots()[2].legit_chan.k_factor, KFactor::PureLos);
        assert!(traj.clone().with_k_map(&ks[..2]).is_err());
        assert_eq!(traj.truncated(2).unwrap().len(), 2);
        assert!(traj.truncated(0).is_err());
    }

    #[test]
    fn free_mode_perfect_attack() {
        let traj = make_trajectory(start(), kmh_to_mps(20.0), 0.1, 8, &chan()).unwrap();
        let scn = scenario();
        let track = constrained_attack_track(&traj, &scn, 3.0, TrackMode::Free).unwrap();
        for (p, s) in track.points.iter().zip(traj.slots()) {
            assert!(crate::geometry::same_bearing(p.position.theta(), s.claimed.theta()));
        }
        assert!(track_kl(&track, &traj, &scn).unwrap() <= 1e-12);
    }

    #[test]
    fn on_road_trails_by_r_l() {
        let traj = Trajectory::new(start(), Heading::Angle(PI), kmh_to_mps(20.0), 0.1, 10, &chan()).unwrap();
        let scn = scenario();
        let track = constrained_attack_track(&traj, &scn, 3.0, TrackMode::OnRoad).unwrap();
        let first = track.points[0].position.to_cartesian();
        assert_relative_eq!(first.0, 110.0, epsilon = 1e-6);
        assert_relative_eq!(first.1, 10.0, epsilon = 1e-9);
        // brute-force oracle over the road for slot 1
        let c0 = start().theta();
        let brute = (0..400_001)
            .map(|i| -2000.0 + i as f64 * 0.01)
            .filter(|x| (x - 10.0).abs() >= 100.0)
            .map(|x: f64| correlation_mag_sq(c0, 10f64.atan2(x), &scn.bs).unwrap())
            .fold(0.0, f64::max);
        let got = correlation_mag_sq(c0, track.points[0].position.theta(), &scn.bs).unwrap();
        assert!(got >= brute - 1e-9);
        check_constraints(&track, &traj, &scn);
        let kl = per_slot_kl(&track, &traj, &scn).unwrap();
        assert!(kl.iter().all(|&d| d > 0.0));
    }

    fn check_constraints(track: &AttackTrack, traj: &Trajectory, scn: &Scenario) {
        for (t, p) in track.points.iter().enumerate() {
            assert!(p.position.distance_to(&traj.slots()[t].claimed) >= scn.r_l);
            if t > 0 {
                assert!(track.points[t - 1].position.distance_to(&p.position) <= track.r_u);
            }
        }
    }

    #[test]
    fn zero_r_u_freezes_attacker() {
        let traj = Trajectory::new(start(), Heading::Angle(PI), kmh_to_mps(20.0), 0.1, 5, &chan()).unwrap();
        let scn = scenario();
        for mode in [TrackMode::OnRoad, TrackMode::Free] {
            let track = constrained_attack_track(&traj, &scn, 0.0, mode);
            if let Ok(track) = track {
                let p0 = track.points[0].position;
                assert!(track.points.iter().all(|p| p.position.distance_to(&p0) <= 1e-12));
            }
        }
    }

    #[test]
    fn radial_free_mode_respects_constraints() {
        let traj = make_trajectory(PolarPoint::new(300.0, 0.3).unwrap(), 30.0, 0.1, 10, &chan()).unwrap();
        let scn = scenario().with_forbidden(vec![crate::attack::AngleInterval::new(0.25, 0.35)]);
        let scn = scn.at_slot(traj.slots()[0].claimed, chan());
        let track = constrained_attack_track(&traj, &scn, 2.0, TrackMode::Free).unwrap();
        check_constraints(&track, &traj, &scn);
        assert!(track.points.iter().all(|p| !scn.is_forbidden(p.position.theta())));
    }

    #[test]
    fn single_slot_reduction() {
        let traj = Trajectory::new(start(), Heading::Angle(PI), kmh_to_mps(20.0), 0.1, 1, &chan()).unwrap();
        let scn = scenario();
        let track = constrained_attack_track(&traj, &scn, 3.0, TrackMode::OnRoad).unwrap();
        let single = crate::attack::min_kl_at(&scn, track.points[0].position.theta()).unwrap();
        assert_eq!(track_kl(&track, &traj, &scn).unwrap(), single);
    }

    #[test]
    fn tracking_rate_examples() {
        assert_eq!(tracking_rates(0.0, 1.5), RatePair { alpha: 0.0, beta: 0.0 });
        let r = tracking_rates(2.0, 1.0);
        assert_relative_eq!(r.alpha, 0.158_655_253_931_457_05, epsilon = 1e-15);
        assert_relative_eq!(r.beta, 0.841_344_746_068_542_9, epsilon = 1e-15);
        let r = tracking_rates(1e8, 1.5);
        assert!(r.alpha < 1e-12 && r.beta > 1.0 - 1e-12);
    }

    #[test]
    fn statistic_sums_slots() {
        use num_complex::Complex64;
        let v = |a: f64, b: f64| CVector::from_vec(vec![Complex64::new(a, b), Complex64::new(b, -a)]);
        let ys = [v(1.0, 2.0)];
        let m0 = [v(0.5, 0.1)];
        let m1 = [v(-0.3, 0.7)];
        assert_eq!(
            tracking_test_statistic(&ys, &m0, &m1, &[0.8]).unwrap(),
            test_statistic(&ys[0], &m0[0], &m1[0], 0.8).unwrap()
        );
        assert_eq!(tracking_test_statistic(&ys, &m0, &m0, &[0.8]).unwrap(), 0.0);
        assert!(tracking_test_statistic(&ys, &m0, &m1, &[0.8, 1.0]).is_err());
    }
}
