//! Positions, antenna arrays, steering vectors and path loss.
//!
//! The base station sits at the origin with its ULA along the x-axis. Angles
//! are measured counterclockwise from the x-axis and kept in (−π, π].

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::{CRowVector, CVector};
use crate::{Error, Result};

pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Propagation speed used unless a scenario overrides it.
pub const DEFAULT_PROPAGATION_SPEED: f64 = 3.0e8;

/// Two angles whose cosines differ by less than this are the same bearing as
/// far as the ULA can tell.
pub const COS_TOLERANCE: f64 = 1e-12;

pub fn normalize_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    // rem_euclid maps −π to π, which is what we want; guard the rounding case
    if t <= -PI {
        t += 2.0 * PI;
    }
    t
}

/// True when `a` and `b` produce the same receive steering vector.
pub fn same_bearing(a: f64, b: f64) -> bool {
    (a.cos() - b.cos()).abs() <= COS_TOLERANCE
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    d: f64,
    theta: f64,
}

impl PolarPoint {
    pub fn new(d: f64, theta: f64) -> Result<Self> {
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Domain(format!("distance must be positive, got {d}")));
        }
        if !theta.is_finite() {
            return Err(Error::Domain(format!("angle must be finite, got {theta}")));
        }
        Ok(Self {
            d,
            theta: normalize_angle(theta),
        })
    }

    pub fn from_cartesian(x: f64, y: f64) -> Result<Self> {
        Self::new(x.hypot(y), y.atan2(x))
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        (self.d * self.theta.cos(), self.d * self.theta.sin())
    }

    /// Euclidean distance between the physical positions.
    pub fn distance_to(&self, other: &PolarPoint) -> f64 {
        let (x0, y0) = self.to_cartesian();
        let (x1, y1) = other.to_cartesian();
        (x1 - x0).hypot(y1 - y0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayKind {
    Ula,
    Uca,
}

/// A uniform linear or circular array. `spacing` is the element spacing for a
/// ULA and the radius for a UCA; `tau = 2π f_c spacing / c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry {
    kind: ArrayKind,
    n: usize,
    spacing: f64,
    carrier_hz: f64,
    tau: f64,
}

impl ArrayGeometry {
    pub fn ula(n: usize, spacing: f64, carrier_hz: f64, c: f64) -> Result<Self> {
        Self::build(ArrayKind::Ula, n, spacing, carrier_hz, c)
    }

    pub fn uca(n: usize, radius: f64, carrier_hz: f64, c: f64) -> Result<Self> {
        Self::build(ArrayKind::Uca, n, radius, carrier_hz, c)
    }

    /// ULA with a given phase constant at 5.9 GHz and the default propagation
    /// speed; the spacing is derived so the invariant holds.
    pub fn ula_with_tau(n: usize, tau: f64) -> Result<Self> {
        Self::with_tau(ArrayKind::Ula, n, tau)
    }

    pub fn uca_with_tau(n: usize, tau: f64) -> Result<Self> {
        Self::with_tau(ArrayKind::Uca, n, tau)
    }

    fn with_tau(kind: ArrayKind, n: usize, tau: f64) -> Result<Self> {
        let carrier_hz = 5.9e9;
        let spacing = tau * DEFAULT_PROPAGATION_SPEED / (2.0 * PI * carrier_hz);
        if tau < 0.0 || !tau.is_finite() {
            return Err(Error::InvalidGeometry(format!("tau must be non-negative, got {tau}")));
        }
        if n == 0 {
            return Err(Error::InvalidGeometry("array needs at least one element".into()));
        }
        Ok(Self {
            kind,
            n,
            spacing,
            carrier_hz,
            tau,
        })
    }

    fn build(kind: ArrayKind, n: usize, spacing: f64, carrier_hz: f64, c: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGeometry("array needs at least one element".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidGeometry(format!("spacing must be positive, got {spacing}")));
        }
        if !(carrier_hz > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidGeometry("carrier and propagation speed must be positive".into()));
        }
        Ok(Self {
            kind,
            n,
            spacing,
            carrier_hz,
            tau: 2.0 * PI * carrier_hz * spacing / c,
        })
    }

    /// Same array with a different element count.
    pub fn with_elements(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGeometry("array needs at least one element".into()));
        }
        Ok(Self { n, ..self.clone() })
    }

    pub fn kind(&self) -> ArrayKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn carrier_hz(&self) -> f64 {
        self.carrier_hz
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    fn expect(&self, kind: ArrayKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::InvalidGeometry(format!("expected {kind:?}, got {:?}", self.kind)))
        }
    }
}

/// BS receive steering vector, element `i` = `exp(j·i·τ_B·cos θ)`.
pub fn steering_rx(theta: f64, bs: &ArrayGeometry) -> Result<CVector> {
    bs.expect(ArrayKind::Ula)?;
    let phase = bs.tau * theta.cos();
    Ok(CVector::from_iterator(
        bs.n,
        (0..bs.n).map(|i| Complex64::from_polar(1.0, i as f64 * phase)),
    ))
}

/// Vehicle transmit steering row for a ULA, element `i` = `exp(−j·i·τ·cos ψ)`.
pub fn steering_tx_ula(psi: f64, veh: &ArrayGeometry) -> Result<CRowVector> {
    veh.expect(ArrayKind::Ula)?;
    let phase = -veh.tau * psi.cos();
    Ok(CRowVector::from_iterator(
        veh.n,
        (0..veh.n).map(|i| Complex64::from_polar(1.0, i as f64 * phase)),
    ))
}

/// Vehicle transmit steering row for a UCA; element `m` (0-based) has angle
/// `φ_m = 2πm/N + φ₁` and value `exp(−j·τ·cos φ_m)`.
pub fn steering_tx_uca(phi1: f64, veh: &ArrayGeometry) -> Result<CRowVector> {
    veh.expect(ArrayKind::Uca)?;
    let n = veh.n as f64;
    Ok(CRowVector::from_iterator(
        veh.n,
        (0..veh.n).map(|m| {
            let phi = 2.0 * PI * m as f64 / n + phi1;
            Complex64::from_polar(1.0, -veh.tau * phi.cos())
        }),
    ))
}

/// Transmit steering row for either array kind; `orientation` is ψ for a ULA
/// and φ₁ for a UCA.
pub fn steering_tx(orientation: f64, veh: &ArrayGeometry) -> Result<CRowVector> {
    match veh.kind {
        ArrayKind::Ula => steering_tx_ula(orientation, veh),
        ArrayKind::Uca => steering_tx_uca(orientation, veh),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    pub ref_distance: f64,
    pub exponent: f64,
    pub carrier_hz: f64,
    pub c: f64,
}

impl PathLossParams {
    pub fn new(ref_distance: f64, exponent: f64, carrier_hz: f64) -> Result<Self> {
        Self::with_speed(ref_distance, exponent, carrier_hz, DEFAULT_PROPAGATION_SPEED)
    }

    pub fn with_speed(ref_distance: f64, exponent: f64, carrier_hz: f64, c: f64) -> Result<Self> {
        if !(ref_distance > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reference distance must be positive, got {ref_distance}"
            )));
        }
        if !(exponent > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "path-loss exponent must be positive, got {exponent}"
            )));
        }
        if !(carrier_hz > 0.0) || !(c > 0.0) {
            return Err(Error::InvalidParameter("carrier and propagation speed must be positive".into()));
        }
        Ok(Self {
            ref_distance,
            exponent,
            carrier_hz,
            c,
        })
    }

    /// Gain at the reference distance, `(c / 4π f_c d_r)²`.
    pub fn reference_gain(&self) -> f64 {
        (self.c / (4.0 * PI * self.carrier_hz * self.ref_distance)).powi(2)
    }
}

/// Linear power gain `(c/4π f_c d_r)²·(d_r/d)^ξ`.
pub fn path_loss(d: f64, p: &PathLossParams) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::Domain(format!("distance must be positive, got {d}")));
    }
    Ok(p.reference_gain() * (p.ref_distance / d).powf(p.exponent))
}

/// `|r₁†r₀|²` in closed form (squared Dirichlet kernel).
///
/// The phase `ν = τ(cos θ₀ − cos θ₁)` and both half-angle sines are carried
/// in double-double precision, so the result keeps full relative accuracy
/// next to the nulls where the plain formula loses digits.
pub fn correlation_mag_sq(theta0: f64, theta1: f64, bs: &ArrayGeometry) -> Result<f64> {
    bs.expect(ArrayKind::Ula)?;
    let (dh, dl) = two_sum(theta0.cos(), -theta1.cos());
    let (nu_h, mut nu_l) = two_prod(bs.tau, dh);
    nu_l += bs.tau * dl;
    let sin_half = sin_dd(0.5 * nu_h, 0.5 * nu_l);
    let n = bs.n as f64;
    let nn = n * n;
    if sin_half == 0.0 {
        return Ok(nn);
    }
    let (bh, mut bl) = two_prod(0.5 * n, nu_h);
    bl += 0.5 * n * nu_l;
    let r = sin_dd(bh, bl) / sin_half;
    Ok((r * r).min(nn))
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `sin(hi + lo)` with the argument reduced against a three-part π.
fn sin_dd(hi: f64, lo: f64) -> f64 {
    const PI_MID: f64 = 1.224_646_799_147_353_2e-16;
    const PI_LOW: f64 = -2.994_769_809_718_339_7e-33;
    let k = (hi / PI).round();
    let (kh, kl) = two_prod(k, PI);
    let (mh, ml) = two_prod(k, PI_MID);
    let r_hi = hi - kh;
    let r_lo = ((lo - kl) - mh) - (ml + k * PI_LOW);
    let (r, e) = two_sum(r_hi, r_lo);
    let s = r.sin() + r.cos() * e;
    if k.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// `(sin(Nν/2)/sin(ν/2))²` with its removable singularity filled in.
pub(crate) fn dirichlet_sq(n: usize, nu: f64) -> f64 {
    let n = n as f64;
    let half = (0.5 * nu).sin();
    if nu == 0.0 || half.abs() < 1e-12 {
        return n * n;
    }
    let r = (0.5 * n * nu).sin() / half;
    (r * r).min(n * n)
}
