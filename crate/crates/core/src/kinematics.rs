//! Special-relativity kinematics along a shared x axis.
//!
//! Two coordinate substitutions are provided: [`lorentz_boost`], used by every
//! other module, and [`voigt_transform`], the older substitution without the
//! gamma factor. The Voigt form is kept only so the two can be compared (see
//! [`crate::wave_covariance`]).
//!
//! Differences such as `C - v` are formed before any ratio so that results
//! stay accurate for `v` close to `C`.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize, Serializer};

use crate::constants::PhysicalConstants;
use crate::error::{domain, require_finite, require_positive, Result};

/// A spacetime sample point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Event {
    pub fn new(t: f64, x: f64, y: f64, z: f64) -> Self {
        Self { t, x, y, z }
    }

    /// `C^2 t^2 - x^2 - y^2 - z^2`.
    pub fn interval(&self, c: f64) -> f64 {
        let ct = c * self.t;
        ct * ct - self.x * self.x - self.y * self.y - self.z * self.z
    }

    /// `C^2 t^2 + x^2 + y^2 + z^2`, a scale for relative comparisons of
    /// [`Event::interval`].
    pub fn euclidean_scale(&self, c: f64) -> f64 {
        let ct = c * self.t;
        ct * ct + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// `1 - v^2/C^2` computed as `(C - v)(C + v) / C^2`.
fn one_minus_beta_sq(v: f64, c: f64) -> f64 {
    ((c - v) / c) * ((c + v) / c)
}

fn check_subluminal(v: f64, c: f64) -> Result<()> {
    require_finite("v", v)?;
    if v.abs() < c {
        Ok(())
    } else {
        Err(domain(format!("v must satisfy |v| < C (v = {v}, C = {c})")))
    }
}

/// `1 / sqrt(1 - v^2/C^2)`.
pub fn gamma_factor(v: f64, k: &PhysicalConstants) -> Result<f64> {
    check_subluminal(v, k.c)?;
    Ok(1.0 / one_minus_beta_sq(v, k.c).sqrt())
}

/// Relative velocity of a primed frame moving along +x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Boost {
    v: f64,
    c: f64,
    gamma: f64,
    rapidity: f64,
}

impl Boost {
    pub fn new(v: f64, k: &PhysicalConstants) -> Result<Self> {
        Self::with_light_speed(v, k.c)
    }

    fn with_light_speed(v: f64, c: f64) -> Result<Self> {
        check_subluminal(v, c)?;
        let gamma = 1.0 / one_minus_beta_sq(v, c).sqrt();
        // atanh(v/C) without forming 1 - v/C from a rounded ratio
        let rapidity = 0.5 * ((c + v) / (c - v)).ln();
        Ok(Self { v, c, gamma, rapidity })
    }

    pub fn from_rapidity(rapidity: f64, k: &PhysicalConstants) -> Result<Self> {
        require_finite("rapidity", rapidity)?;
        let v = k.c * rapidity.tanh();
        if v.abs() >= k.c {
            return Err(domain(format!("rapidity {rapidity} is not representable below C")));
        }
        Ok(Self { v, c: k.c, gamma: rapidity.cosh(), rapidity })
    }

    pub fn velocity(&self) -> f64 {
        self.v
    }

    pub fn beta(&self) -> f64 {
        self.v / self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn rapidity(&self) -> f64 {
        self.rapidity
    }

    pub fn speed_of_light(&self) -> f64 {
        self.c
    }

    pub fn inverse(&self) -> Self {
        Self { v: -self.v, c: self.c, gamma: self.gamma, rapidity: -self.rapidity }
    }

    /// Boost equivalent to applying `self` and then `other` (collinear
    /// velocity addition). Fails if the sum rounds onto the light cone.
    pub fn then(&self, other: &Boost) -> Result<Self> {
        let c = self.c;
        let v = (self.v + other.v) * c * c / stable_light_cone_gap(self.v, -other.v, c);
        Self::with_light_speed(v, c)
    }
}

/// `x' = gamma (x - v t)`, `t' = gamma (t - v x / C^2)`; `y`, `z` unchanged.
pub fn lorentz_boost(ev: &Event, b: &Boost) -> Event {
    let (v, c, g) = (b.v, b.c, b.gamma);
    Event {
        t: g * (ev.t - v * ev.x / (c * c)),
        x: g * (ev.x - v * ev.t),
        y: ev.y,
        z: ev.z,
    }
}

/// `x' = x - v t`, `t' = t - v x / C^2`, literally without gamma.
pub fn voigt_transform(ev: &Event, v: f64, k: &PhysicalConstants) -> Result<Event> {
    check_subluminal(v, k.c)?;
    let c = k.c;
    Ok(Event { t: ev.t - v * ev.x / (c * c), x: ev.x - v * ev.t, y: ev.y, z: ev.z })
}

/// `C^2 - u v` arranged so that no two nearly equal terms are subtracted.
fn stable_light_cone_gap(u: f64, v: f64, c: f64) -> f64 {
    if u >= 0.0 && v >= 0.0 {
        c * (c - u) + u * (c - v)
    } else if u <= 0.0 && v <= 0.0 {
        c * (c + u) - u * (c + v)
    } else {
        c * c - u * v
    }
}

/// Velocity `u` measured in a frame moving with speed `v` along +x.
///
/// Transverse components carry the `1/gamma` factor, so `|u'| <= C` whenever
/// `|u| <= C`.
pub fn compose_velocities(u: Vector3<f64>, v: f64, k: &PhysicalConstants) -> Result<Vector3<f64>> {
    let c = k.c;
    check_subluminal(v, c)?;
    if !u.iter().all(|x| x.is_finite()) {
        return Err(domain("velocity components must be finite"));
    }
    let speed = u.norm();
    // a few ulps of slack so that normalized light-like inputs are accepted
    if speed > c * (1.0 + 4.0 * f64::EPSILON) {
        return Err(domain(format!("|u| must not exceed C (|u| = {speed}, C = {c})")));
    }
    let gap = stable_light_cone_gap(u.x, v, c);
    let scale = c * c / gap;
    let inv_gamma = one_minus_beta_sq(v, c).sqrt();
    Ok(Vector3::new((u.x - v) * scale, u.y * scale * inv_gamma, u.z * scale * inv_gamma))
}

/// Clock readings from both sides of a boost. `dilated * contracted == proper^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalPair {
    pub dilated: f64,
    pub contracted: f64,
    pub proper: f64,
}

impl IntervalPair {
    pub fn product(&self) -> f64 {
        self.dilated * self.contracted
    }
}

pub fn time_dilation_pair(dt: f64, v: f64, k: &PhysicalConstants) -> Result<IntervalPair> {
    require_positive("dt", dt)?;
    let g = gamma_factor(v, k)?;
    Ok(IntervalPair { dilated: g * dt, contracted: dt / g, proper: dt })
}

/// Lengths of a moving rod measured at simultaneous primed times (`tilde_l`)
/// and following the moving origin (`bar_l`). Both equal `rest / gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LengthPair {
    pub tilde_l: f64,
    pub bar_l: f64,
    pub rest: f64,
    pub gamma: f64,
}

impl LengthPair {
    /// `l = gamma * bar_l`.
    pub fn reconstructed_rest(&self) -> f64 {
        self.gamma * self.bar_l
    }

    /// `tilde_l * bar_l`, which equals `(rest / gamma)^2`.
    pub fn product(&self) -> f64 {
        self.tilde_l * self.bar_l
    }

    pub fn contracted_sq(&self) -> f64 {
        let lc = self.rest / self.gamma;
        lc * lc
    }
}

pub fn length_contraction_pair(l: f64, v: f64, k: &PhysicalConstants) -> Result<LengthPair> {
    require_positive("l", l)?;
    let gamma = gamma_factor(v, k)?;
    // gamma (1 - v^2/C^2) l, written the way it is derived
    let contracted = gamma * one_minus_beta_sq(v, k.c) * l;
    Ok(LengthPair { tilde_l: contracted, bar_l: l / gamma, rest: l, gamma })
}

/// A speed that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseSpeed {
    Finite(f64),
    Infinite,
}

impl PhaseSpeed {
    /// Floating representation; `Infinite` maps to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match *self {
            PhaseSpeed::Finite(v) => v,
            PhaseSpeed::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PhaseSpeed::Infinite)
    }
}

impl Serialize for PhaseSpeed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            PhaseSpeed::Finite(v) => s.serialize_f64(v),
            PhaseSpeed::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Speed `C^2 / v` at which the simultaneity surface of the moving frame
/// sweeps the rest frame. At `v = 0` the surface moves infinitely fast.
pub fn simultaneity_phase_velocity(v: f64, k: &PhysicalConstants) -> Result<PhaseSpeed> {
    require_finite("v", v)?;
    if v.abs() > k.c {
        return Err(domain(format!("v must satisfy |v| <= C (v = {v})")));
    }
    if v == 0.0 {
        Ok(PhaseSpeed::Infinite)
    } else {
        Ok(PhaseSpeed::Finite(k.c * k.c / v))
    }
}

/// Survival law applied over the boosted decay length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayLaw {
    /// `exp(-d / L)`, lifetime read as a mean life.
    #[default]
    MeanLife,
    /// `2^(-d / L)`, lifetime read as a half-life.
    HalfLife,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MuonPassage {
    pub rest_length: f64,
    pub boosted_length: f64,
    pub surviving_fraction: f64,
}

pub fn muon_penetration(
    tau0: f64,
    gamma: f64,
    depth: f64,
    law: DecayLaw,
    k: &PhysicalConstants,
) -> Result<MuonPassage> {
    require_positive("tau0", tau0)?;
    require_finite("gamma", gamma)?;
    require_finite("depth", depth)?;
    if gamma < 1.0 {
        return Err(domain(format!("gamma must be >= 1, got {gamma}")));
    }
    if depth < 0.0 {
        return Err(domain(format!("depth must be >= 0, got {depth}")));
    }
    let rest_length = tau0 * k.c;
    let boosted_length = gamma * rest_length;
    let ratio = depth / boosted_length;
    let surviving_fraction = match law {
        DecayLaw::MeanLife => (-ratio).exp(),
        DecayLaw::HalfLife => (-ratio).exp2(),
    };
    Ok(MuonPassage { rest_length, boosted_length, surviving_fraction })
}
