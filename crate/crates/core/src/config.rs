//! Scenario files.
//!
//! A config is a TOML document with the sections `[bs]`, `[legit]`,
//! `[attacker]`, `[path_loss]` and `[detector]`, plus one optional section per
//! experiment. Keys ending in `_db` are converted to linear on load. Errors
//! carry the line and column of the offending key; keys set with `--set`
//! are reported as such.
//!
//! ```toml
//! seed = 7
//! trials = 100000
//!
//! [bs]
//! n = 4
//! tau = 3.141592653589793
//!
//! [legit]
//! n = 3
//! d = 100.0
//! theta_over_pi = 0.5
//! K0_db = 1
//! sigma2_db = 0
//! snr_db = 5
//!
//! [attacker]
//! n = 8
//! K1_db = 1
//! sigma2_db = 0
//! ```

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::Deserialize;

use crate::attack::{AngleInterval, Scenario};
use crate::channel::{ChannelParams, KFactor};
use crate::geometry::{path_loss, ArrayGeometry, ArrayKind, PathLossParams, PolarPoint, DEFAULT_PROPAGATION_SPEED};
use crate::tracking::{Heading, TrackMode};
use crate::units::db_to_linear;
use crate::{Error, Result};

pub const DEFAULT_CARRIER_HZ: f64 = 5.9e9;
pub const DEFAULT_TRIALS: usize = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Roc,
    KlMap,
    TotalErrorGrid,
    MinAntennasGrid,
    Track,
    Correlation,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Roc,
        Experiment::KlMap,
        Experiment::TotalErrorGrid,
        Experiment::MinAntennasGrid,
        Experiment::Track,
        Experiment::Correlation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Roc => "roc",
            Experiment::KlMap => "kl-map",
            Experiment::TotalErrorGrid => "total-error-grid",
            Experiment::MinAntennasGrid => "min-antennas-grid",
            Experiment::Track => "track",
            Experiment::Correlation => "correlation",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// How the legitimate transmit power is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSpec {
    /// `p₀` directly.
    Transmit(f64),
    /// `p₀g(d₀)` at the claimed distance.
    Received(f64),
    /// `p₀g(d₀)/σ₀²`.
    Snr(f64),
}

/// Scenario in linear units, before array and channel objects are built.
/// Experiments clone and tweak it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub bs_n: usize,
    pub bs_tau: f64,
    pub legit_n: usize,
    pub legit_tau: f64,
    pub psi0: f64,
    pub d0: f64,
    pub theta0: f64,
    pub k0: KFactor,
    pub sigma0: f64,
    pub power: PowerSpec,
    pub mal_kind: ArrayKind,
    pub mal_n: usize,
    pub mal_tau: f64,
    pub psi1: f64,
    pub k1: KFactor,
    pub sigma1: f64,
    pub r_l: f64,
    /// Attacker distance; when absent the attacker sits the nearest
    /// admissible distance from the claimed one along its bearing.
    pub d1: Option<f64>,
    /// Bearing the detector assumes; when absent it uses the optimal one.
    pub theta1: Option<f64>,
    pub forbidden: Vec<AngleInterval>,
    pub path: PathLossParams,
}

impl ScenarioSpec {
    /// Transmit power `p₀` implied at claimed distance `d0`.
    pub fn tx_power(&self) -> Result<f64> {
        let g = path_loss(self.d0, &self.path)?;
        Ok(match self.power {
            PowerSpec::Transmit(p) => p,
            PowerSpec::Received(pg) => pg / g,
            PowerSpec::Snr(s) => s * self.sigma0 / g,
        })
    }

    pub fn legit_channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.k0, self.sigma0, self.tx_power()?, self.path)
    }

    pub fn build(&self) -> Result<Scenario> {
        let bs = ArrayGeometry::ula_with_tau(self.bs_n, self.bs_tau)?;
        let legit = ArrayGeometry::ula_with_tau(self.legit_n, self.legit_tau)?;
        let mal = match self.mal_kind {
            ArrayKind::Ula => ArrayGeometry::ula_with_tau(self.mal_n, self.mal_tau)?,
            ArrayKind::Uca => ArrayGeometry::uca_with_tau(self.mal_n, self.mal_tau)?,
        };
        let mal_chan = ChannelParams::new(self.k1, self.sigma1, 0.0, self.path)?;
        let mut scn = Scenario::new(
            bs,
            legit,
            mal,
            PolarPoint::new(self.d0, self.theta0)?,
            self.legit_channel()?,
            mal_chan,
            self.r_l,
        )?
        .with_forbidden(self.forbidden.clone());
        scn.psi0 = self.psi0;
        scn.psi1 = self.psi1;
        scn.d1 = self.d1;
        Ok(scn)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocSettings {
    pub snr_db: Vec<f64>,
    /// Detector bearings θ₁/π; empty means use the configured or optimal one.
    pub theta1_over_pi: Vec<f64>,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KlMapSettings {
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TotalErrorGridSettings {
    pub n_b: Vec<usize>,
    pub n0: Vec<usize>,
    pub k0_db: Vec<f64>,
    pub theta1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinAntennasSettings {
    pub k1_db: Vec<f64>,
    pub sigma1_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackSettings {
    pub heading: Heading,
    pub speed_mps: f64,
    pub dt: f64,
    pub slots: usize,
    pub r_u: f64,
    pub mode: TrackMode,
    /// Window lengths evaluated; each row uses a fixed `T` from this range.
    pub t_min: usize,
    pub t_max: usize,
    /// Mean claimed-location error in meters.
    pub jitter_mean: f64,
    pub k0_db_map: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSettings {
    pub n_b: Vec<usize>,
    pub theta_over_pi: (f64, f64),
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Option<Experiment>,
    pub scenario: ScenarioSpec,
    pub p0_prior: f64,
    /// Fixed LRT threshold; `None` means `λ* = P₀/(1−P₀)`.
    pub lambda: Option<f64>,
    pub seed: u64,
    pub trials: usize,
    pub roc: RocSettings,
    pub kl_map: KlMapSettings,
    pub total_error_grid: TotalErrorGridSettings,
    pub min_antennas_grid: MinAntennasSettings,
    pub track: TrackSettings,
    pub correlation: CorrelationSettings,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    experiment: Option<String>,
    seed: Option<u64>,
    trials: Option<usize>,
    bs: Option<RawBs>,
    legit: Option<RawLegit>,
    attacker: Option<RawAttacker>,
    path_loss: Option<RawPath>,
    detector: Option<RawDetector>,
    roc: Option<RawRoc>,
    kl_map: Option<RawKlMap>,
    total_error_grid: Option<RawTotalErrorGrid>,
    min_antennas_grid: Option<RawMinAntennas>,
    track: Option<RawTrack>,
    correlation: Option<RawCorrelation>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBs {
    n: Option<usize>,
    tau: Option<f64>,
    spacing: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawLegit {
    n: Option<usize>,
    tau: Option<f64>,
    spacing: Option<f64>,
    psi: Option<f64>,
    d: Option<f64>,
    theta: Option<f64>,
    theta_over_pi: Option<f64>,
    K0: Option<f64>,
    K0_db: Option<f64>,
    sigma2: Option<f64>,
    sigma2_db: Option<f64>,
    p: Option<f64>,
    p_db: Option<f64>,
    rx_power_db: Option<f64>,
    snr_db: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct RawAttacker {
    kind: Option<String>,
    n: Option<usize>,
    tau: Option<f64>,
    spacing: Option<f64>,
    orientation: Option<f64>,
    K1: Option<f64>,
    K1_db: Option<f64>,
    sigma2: Option<f64>,
    sigma2_db: Option<f64>,
    r_l: Option<f64>,
    d: Option<f64>,
    theta: Option<f64>,
    theta_over_pi: Option<f64>,
    forbidden: Option<Vec<[f64; 2]>>,
    forbidden_over_pi: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPath {
    d_r: Option<f64>,
    xi: Option<f64>,
    carrier_hz: Option<f64>,
    c: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    p0: Option<f64>,
    lambda: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRoc {
    snr_db: Option<Vec<f64>>,
    theta1_over_pi: Option<Vec<f64>>,
    lambda_min: Option<f64>,
    lambda_max: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawKlMap {
    x_min: Option<f64>,
    x_max: Option<f64>,
    y_min: Option<f64>,
    y_max: Option<f64>,
    points: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTotalErrorGrid {
    n_b: Option<Vec<usize>>,
    n0: Option<Vec<usize>>,
    k0_db: Option<Vec<f64>>,
    theta1_over_pi: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMinAntennas {
    k1_db: Option<Vec<f64>>,
    sigma1_db: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrack {
    heading: Option<String>,
    heading_over_pi: Option<f64>,
    speed_kmh: Option<f64>,
    dt: Option<f64>,
    slots: Option<usize>,
    r_u: Option<f64>,
    mode: Option<String>,
    t_min: Option<usize>,
    t_max: Option<usize>,
    jitter_mean_m: Option<f64>,
    k0_db_map: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCorrelation {
    n_b: Option<Vec<usize>>,
    theta_min_over_pi: Option<f64>,
    theta_max_over_pi: Option<f64>,
    points: Option<usize>,
}

/// Byte spans of every key in the original text, by dotted path.
struct Locator<'a> {
    text: &'a str,
    spans: HashMap<String, Range<usize>>,
    overridden: Vec<String>,
}

impl<'a> Locator<'a> {
    fn new(text: &'a str) -> Result<Self> {
        let doc = toml::de::DeTable::parse(text).map_err(|e| syntax_error(text, &e))?;
        let mut spans = HashMap::new();
        collect_spans(doc.get_ref(), "", &mut spans);
        Ok(Self {
            text,
            spans,
            overridden: Vec::new(),
        })
    }

    fn position(&self, path: &str) -> String {
        if self.overridden.iter().any(|o| o == path) {
            return "--set".into();
        }
        match self.spans.get(path) {
            Some(span) => {
                let (line, col) = line_col(self.text, span.start);
                format!("line {line}, column {col}")
            }
            None => "config".into(),
        }
    }

    fn err(&self, path: &str, msg: impl fmt::Display) -> Error {
        Error::Config(format!("{}: `{path}`: {msg}", self.position(path)))
    }

    /// Location of a key known only by its last component.
    fn find_leaf(&self, leaf: &str) -> Option<String> {
        let mut hits: Vec<&String> = self
            .spans
            .keys()
            .chain(self.overridden.iter())
            .filter(|p| p.as_str() == leaf || p.ends_with(&format!(".{leaf}")))
            .collect();
        hits.sort();
        hits.first().map(|s| s.to_string())
    }
}

fn collect_spans(table: &toml::de::DeTable<'_>, prefix: &str, out: &mut HashMap<String, Range<usize>>) {
    for (k, v) in table.iter() {
        let path = if prefix.is_empty() {
            k.get_ref().to_string()
        } else {
            format!("{prefix}.{}", k.get_ref())
        };
        out.insert(path.clone(), k.span());
        if let toml::de::DeValue::Table(t) = v.get_ref() {
            collect_spans(t, &path, out);
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

fn syntax_error(text: &str, e: &toml::de::Error) -> Error {
    match e.span() {
        Some(span) => {
            let (line, col) = line_col(text, span.start);
            Error::Config(format!("line {line}, column {col}: {}", e.message()))
        }
        None => Error::Config(e.message().to_string()),
    }
}

/// Parses `key.path=value`; the value is read as a TOML value and falls back
/// to a bare string.
pub fn parse_override(s: &str) -> Result<(String, toml::Value)> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override `{s}` has an empty key")));
    }
    let value = value.trim();
    let parsed = format!("v = {value}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(value.to_string()));
    Ok((key.to_string(), parsed))
}

fn apply_override(root: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let mut parts: Vec<&str> = key.split('.').collect();
    let leaf = parts.pop().expect("split yields at least one part");
    let mut table = root;
    for part in parts {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("--set: `{part}` in `{key}` is not a section")))?;
    }
    table.insert(leaf.to_string(), value);
    Ok(())
}

/// Parses a config document and applies `key=value` overrides on top.
pub fn parse_config(text: &str, overrides: &[(String, toml::Value)]) -> Result<ExperimentConfig> {
    let mut loc = Locator::new(text)?;
    let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| syntax_error(text, &e))?;
    for (k, v) in overrides {
        apply_override(&mut table, k, v.clone())?;
        loc.overridden.push(k.clone());
    }
    let raw: RawFile = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| {
        let msg = e.message().to_string();
        match backticked(&msg).and_then(|leaf| loc.find_leaf(&leaf)) {
            Some(path) => loc.err(&path, &msg),
            None => Error::Config(msg),
        }
    })?;
    resolve(raw, &loc)
}

fn backticked(msg: &str) -> Option<String> {
    let start = msg.find('`')? + 1;
    let end = start + msg[start..].find('`')?;
    Some(msg[start..end].to_string())
}

fn exclusive<T: Copy>(loc: &Locator, options: &[(&str, Option<T>)]) -> Result<Option<(String, T)>> {
    let set: Vec<(&str, T)> = options.iter().filter_map(|(k, v)| v.map(|v| (*k, v))).collect();
    if set.len() > 1 {
        return Err(loc.err(set[1].0, format!("conflicts with `{}`", set[0].0)));
    }
    Ok(set.first().map(|(k, v)| (k.to_string(), *v)))
}

fn require<T>(loc: &Locator, path: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| loc.err(path, "missing required key"))
}

fn positive(loc: &Locator, path: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(loc.err(path, format!("must be positive and finite, got {v}")))
    }
}

fn k_factor(loc: &Locator, linear_key: &str, db_key: &str, linear: Option<f64>, db: Option<f64>) -> Result<KFactor> {
    let (key, value) = match exclusive(loc, &[(linear_key, linear), (db_key, db)])? {
        Some(kv) => kv,
        None => return Err(loc.err(linear_key, format!("missing required key (or `{db_key}`)"))),
    };
    let k = if key == db_key { db_to_linear(value) } else { value };
    KFactor::linear(k).map_err(|e| loc.err(&key, e))
}

fn noise(loc: &Locator, section: &str, linear: Option<f64>, db: Option<f64>) -> Result<f64> {
    let lk = format!("{section}.sigma2");
    let dk = format!("{section}.sigma2_db");
    match exclusive(loc, &[(&lk, linear), (&dk, db)])? {
        Some((k, v)) if k == dk => Ok(db_to_linear(v)),
        Some((k, v)) => positive(loc, &k, v),
        None => Err(loc.err(&lk, format!("missing required key (or `{dk}`)"))),
    }
}

fn angle(loc: &Locator, section: &str, rad: Option<f64>, over_pi: Option<f64>) -> Result<Option<f64>> {
    let rk = format!("{section}.theta");
    let pk = format!("{section}.theta_over_pi");
    Ok(match exclusive(loc, &[(&rk, rad), (&pk, over_pi)])? {
        Some((k, v)) if k == pk => Some(v * PI),
        Some((_, v)) => Some(v),
        None => None,
    })
}

fn array_tau(loc: &Locator, section: &str, tau: Option<f64>, spacing: Option<f64>, carrier: f64, c: f64) -> Result<f64> {
    let tk = format!("{section}.tau");
    let sk = format!("{section}.spacing");
    match exclusive(loc, &[(&tk, tau), (&sk, spacing)])? {
        Some((k, v)) if k == sk => Ok(2.0 * PI * carrier * positive(loc, &k, v)? / c),
        Some((k, v)) => {
            if v >= 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(loc.err(&k, format!("must be >= 0, got {v}")))
            }
        }
        None => Ok(PI),
    }
}

fn count(loc: &Locator, path: &str, v: Option<usize>) -> Result<usize> {
    let n = require(loc, path, v)?;
    if n == 0 {
        return Err(loc.err(path, "must be at least 1"));
    }
    Ok(n)
}

fn resolve(raw: RawFile, loc: &Locator) -> Result<ExperimentConfig> {
    let experiment = raw
        .experiment
        .as_deref()
        .map(|s| s.parse::<Experiment>().map_err(|e| loc.err("experiment", e)))
        .transpose()?;
    let rp = raw.path_loss.unwrap_or_default();
    let carrier = positive(loc, "path_loss.carrier_hz", rp.carrier_hz.unwrap_or(DEFAULT_CARRIER_HZ))?;
    let c = positive(loc, "path_loss.c", rp.c.unwrap_or(DEFAULT_PROPAGATION_SPEED))?;
    let d_r = positive(loc, "path_loss.d_r", rp.d_r.unwrap_or(1.0))?;
    let xi = positive(loc, "path_loss.xi", rp.xi.unwrap_or(3.0))?;
    let path = PathLossParams::with_speed(d_r, xi, carrier, c).map_err(|e| loc.err("path_loss", e))?;

    let bs = raw.bs.ok_or_else(|| loc.err("bs", "missing required section"))?;
    let legit = raw.legit.ok_or_else(|| loc.err("legit", "missing required section"))?;
    let att = raw.attacker.ok_or_else(|| loc.err("attacker", "missing required section"))?;

    let bs_n = count(loc, "bs.n", bs.n)?;
    let bs_tau = array_tau(loc, "bs", bs.tau, bs.spacing, carrier, c)?;

    let legit_n = count(loc, "legit.n", legit.n)?;
    let legit_tau = array_tau(loc, "legit", legit.tau, legit.spacing, carrier, c)?;
    let d0 = positive(loc, "legit.d", require(loc, "legit.d", legit.d)?)?;
    let theta0 = angle(loc, "legit", legit.theta, legit.theta_over_pi)?
        .ok_or_else(|| loc.err("legit.theta", "missing required key (or `legit.theta_over_pi`)"))?;
    let k0 = k_factor(loc, "legit.K0", "legit.K0_db", legit.K0, legit.K0_db)?;
    let sigma0 = noise(loc, "legit", legit.sigma2, legit.sigma2_db)?;
    let power = match exclusive(
        loc,
        &[
            ("legit.p", legit.p),
            ("legit.p_db", legit.p_db),
            ("legit.rx_power_db", legit.rx_power_db),
            ("legit.snr_db", legit.snr_db),
        ],
    )? {
        Some((k, v)) => match k.as_str() {
            "legit.p" => {
                if !(v >= 0.0) {
                    return Err(loc.err(&k, format!("must be >= 0, got {v}")));
                }
                PowerSpec::Transmit(v)
            }
            "legit.p_db" => PowerSpec::Transmit(db_to_linear(v)),
            "legit.rx_power_db" => PowerSpec::Received(db_to_linear(v)),
            _ => PowerSpec::Snr(db_to_linear(v)),
        },
        None => {
            return Err(loc.err(
                "legit.p",
                "missing required key (one of `p`, `p_db`, `rx_power_db`, `snr_db`)",
            ))
        }
    };

    let mal_kind = match att.kind.as_deref().unwrap_or("ula") {
        "ula" => ArrayKind::Ula,
        "uca" => ArrayKind::Uca,
        other => return Err(loc.err("attacker.kind", format!("expected `ula` or `uca`, got `{other}`"))),
    };
    let mal_n = count(loc, "attacker.n", att.n)?;
    let mal_tau = array_tau(loc, "attacker", att.tau, att.spacing, carrier, c)?;
    let k1 = k_factor(loc, "attacker.K1", "attacker.K1_db", att.K1, att.K1_db)?;
    let sigma1 = noise(loc, "attacker", att.sigma2, att.sigma2_db)?;
    let r_l = positive(loc, "attacker.r_l", att.r_l.unwrap_or(10.0))?;
    let d1 = att.d.map(|d| positive(loc, "attacker.d", d)).transpose()?;
    let theta1 = angle(loc, "attacker", att.theta, att.theta_over_pi)?;
    let mut forbidden: Vec<AngleInterval> = Vec::new();
    match (att.forbidden, att.forbidden_over_pi) {
        (Some(_), Some(_)) => return Err(loc.err("attacker.forbidden_over_pi", "conflicts with `attacker.forbidden`")),
        (Some(v), None) => forbidden.extend(v.iter().map(|[a, b]| AngleInterval::new(*a, *b))),
        (None, Some(v)) => forbidden.extend(v.iter().map(|[a, b]| AngleInterval::new(a * PI, b * PI))),
        (None, None) => {}
    }

    let scenario = ScenarioSpec {
        bs_n,
        bs_tau,
        legit_n,
        legit_tau,
        psi0: legit.psi.unwrap_or(PI / 2.0),
        d0,
        theta0,
        k0,
        sigma0,
        power,
        mal_kind,
        mal_n,
        mal_tau,
        psi1: att.orientation.unwrap_or(PI / 2.0),
        k1,
        sigma1,
        r_l,
        d1,
        theta1,
        forbidden,
        path,
    };

    let det = raw.detector.unwrap_or_default();
    let p0_prior = det.p0.unwrap_or(0.5);
    if !(p0_prior > 0.0 && p0_prior < 1.0) {
        return Err(loc.err("detector.p0", format!("prior must lie in (0, 1), got {p0_prior}")));
    }
    let lambda = det.lambda.map(|l| positive(loc, "detector.lambda", l)).transpose()?;

    let roc = {
        let r = raw.roc.unwrap_or_default();
        let lambda_min = positive(loc, "roc.lambda_min", r.lambda_min.unwrap_or(1e-3))?;
        let lambda_max = positive(loc, "roc.lambda_max", r.lambda_max.unwrap_or(1e3))?;
        if lambda_max < lambda_min {
            return Err(loc.err("roc.lambda_max", "must be >= roc.lambda_min"));
        }
        RocSettings {
            snr_db: r.snr_db.unwrap_or_default(),
            theta1_over_pi: r.theta1_over_pi.unwrap_or_default(),
            lambda_min,
            lambda_max,
            points: count(loc, "roc.points", Some(r.points.unwrap_or(50)))?,
        }
    };

    let kl_map = {
        let k = raw.kl_map.unwrap_or_default();
        let span = 2.0 * d0.max(50.0);
        KlMapSettings {
            x_range: (k.x_min.unwrap_or(-span), k.x_max.unwrap_or(span)),
            y_range: (k.y_min.unwrap_or(-span), k.y_max.unwrap_or(span)),
            points: count(loc, "kl_map.points", Some(k.points.unwrap_or(101)))?,
        }
    };

    let total_error_grid = {
        let g = raw.total_error_grid.unwrap_or_default();
        TotalErrorGridSettings {
            n_b: g.n_b.unwrap_or_else(|| vec![2, 4, 6, 8]),
            n0: g.n0.unwrap_or_else(|| vec![2, 4, 6, 8]),
            k0_db: g.k0_db.unwrap_or_else(|| vec![-10.0, 0.0, 10.0]),
            theta1: g.theta1_over_pi.unwrap_or(0.25) * PI,
        }
    };

    let min_antennas_grid = {
        let g = raw.min_antennas_grid.unwrap_or_default();
        MinAntennasSettings {
            k1_db: g.k1_db.unwrap_or_else(|| (-10..=10).map(|k| k as f64).collect()),
            sigma1_db: g.sigma1_db.unwrap_or_else(|| vec![-100.0, -95.0, -90.0, -87.0]),
        }
    };

    let track = {
        let t = raw.track.unwrap_or_default();
        let heading = match (t.heading.as_deref(), t.heading_over_pi) {
            (Some(_), Some(_)) => return Err(loc.err("track.heading_over_pi", "conflicts with `track.heading`")),
            (None, Some(h)) => Heading::Angle(h * PI),
            (Some("toward_bs") | None, None) => Heading::TowardBs,
            (Some(other), None) => {
                return Err(loc.err(
                    "track.heading",
                    format!("expected `toward_bs` (or set `heading_over_pi`), got `{other}`"),
                ))
            }
        };
        let mode = match t.mode.as_deref().unwrap_or("on_road") {
            "on_road" => TrackMode::OnRoad,
            "free" => TrackMode::Free,
            other => return Err(loc.err("track.mode", format!("expected `on_road` or `free`, got `{other}`"))),
        };
        let slots = count(loc, "track.slots", Some(t.slots.unwrap_or(10)))?;
        let t_min = count(loc, "track.t_min", Some(t.t_min.unwrap_or(1)))?;
        let t_max = count(loc, "track.t_max", Some(t.t_max.unwrap_or(slots)))?;
        if t_min > t_max || t_max > slots {
            return Err(loc.err("track.t_max", format!("need 1 <= t_min <= t_max <= slots ({slots})")));
        }
        let speed_kmh = t.speed_kmh.unwrap_or(20.0);
        if !(speed_kmh >= 0.0) {
            return Err(loc.err("track.speed_kmh", format!("must be >= 0, got {speed_kmh}")));
        }
        let r_u = t.r_u.unwrap_or(3.0);
        if !(r_u >= 0.0) {
            return Err(loc.err("track.r_u", format!("must be >= 0, got {r_u}")));
        }
        let jitter_mean = t.jitter_mean_m.unwrap_or(0.0);
        if !(jitter_mean >= 0.0) {
            return Err(loc.err("track.jitter_mean_m", format!("must be >= 0, got {jitter_mean}")));
        }
        if let Some(map) = &t.k0_db_map {
            if map.len() != slots {
                return Err(loc.err("track.k0_db_map", format!("needs {slots} entries, got {}", map.len())));
            }
        }
        TrackSettings {
            heading,
            speed_mps: crate::units::kmh_to_mps(speed_kmh),
            dt: positive(loc, "track.dt", t.dt.unwrap_or(0.1))?,
            slots,
            r_u,
            mode,
            t_min,
            t_max,
            jitter_mean,
            k0_db_map: t.k0_db_map,
        }
    };

    let correlation = {
        let c = raw.correlation.unwrap_or_default();
        CorrelationSettings {
            n_b: c.n_b.unwrap_or_else(|| vec![bs_n]),
            theta_over_pi: (c.theta_min_over_pi.unwrap_or(0.0), c.theta_max_over_pi.unwrap_or(1.0)),
            points: count(loc, "correlation.points", Some(c.points.unwrap_or(1001)))?,
        }
    };

    Ok(ExperimentConfig {
        experiment,
        scenario,
        p0_prior,
        lambda,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        trials: raw.trials.unwrap_or(DEFAULT_TRIALS),
        roc,
        kl_map,
        total_error_grid,
        min_antennas_grid,
        track,
        correlation,
    })
}
