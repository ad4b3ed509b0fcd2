//! Michelson-Morley and Fizeau interferometers.
//!
//! The Michelson apparatus is evaluated under three kinematic pictures: a
//! Galilean ether wind, the same wind with the arm along the wind contracted
//! by `1/gamma`, and Lorentz kinematics, where light is isotropic in the
//! apparatus frame. The Galilean round-trip time for an arm at angle `theta`
//! to the wind is the classical `(2l/C) gamma^2 sqrt(1 - beta^2 sin^2 theta)`
//! (it reduces to `2l/(C sqrt(1 - beta^2))` for the perpendicular arm).
//!
//! Fringe shifts are optical path differences over the wavelength, positive
//! when arm 1 takes longer.

use std::f64::consts::FRAC_PI_2;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, require_finite, require_positive, Result};
use crate::kinematics::gamma_factor;
use crate::numfmt::format_f64;
use crate::optics::{fresnel_drag, Medium};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtherKinematics {
    GalileanEther,
    Lorentz,
    GalileanWithContraction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferometerConfig {
    pub arm_length: f64,
    pub wavelength: f64,
    pub ether_speed: f64,
    /// Angle of arm 1 to the wind (rad); arm 2 sits at `orientation + pi/2`.
    pub orientation: f64,
    pub kinematics: EtherKinematics,
}

impl InterferometerConfig {
    pub fn validate(&self, k: &PhysicalConstants) -> Result<()> {
        require_positive("arm_length", self.arm_length)?;
        require_positive("wavelength", self.wavelength)?;
        require_finite("orientation", self.orientation)?;
        require_finite("ether_speed", self.ether_speed)?;
        if !(self.ether_speed >= 0.0 && self.ether_speed < k.c) {
            return Err(domain(format!("ether_speed must satisfy 0 <= v < C, got {}", self.ether_speed)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RestSchedule {
    pub t1a: f64,
    pub t2a: f64,
    pub t1b: f64,
    pub t2b: f64,
}

/// Mirror arrival times with the apparatus at rest: both arms reach their
/// far mirror at `l/C` and return at `2l/C`.
pub fn rest_frame_schedule(l: f64, k: &PhysicalConstants) -> Result<RestSchedule> {
    require_finite("l", l)?;
    if l < 0.0 {
        return Err(domain(format!("arm length must be >= 0, got {l}")));
    }
    let out = l / k.c;
    let back = 2.0 * l / k.c;
    Ok(RestSchedule { t1a: out, t2a: back, t1b: out, t2b: back })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArmTimes {
    pub t_parallel: f64,
    pub t_perpendicular: f64,
}

/// Round-trip time of an arm at angle `theta` to the wind, together with the
/// difference against the arm at `theta + pi/2`.
struct ArmModel {
    l: f64,
    c: f64,
    beta: f64,
    gamma: f64,
    kinematics: EtherKinematics,
}

impl ArmModel {
    fn new(cfg: &InterferometerConfig, k: &PhysicalConstants) -> Result<Self> {
        cfg.validate(k)?;
        Ok(Self {
            l: cfg.arm_length,
            c: k.c,
            beta: cfg.ether_speed / k.c,
            gamma: gamma_factor(cfg.ether_speed, k)?,
            kinematics: cfg.kinematics,
        })
    }

    fn round_trip(&self, theta: f64) -> f64 {
        let (b2, g2) = (self.beta * self.beta, self.gamma * self.gamma);
        let base = 2.0 * self.l / self.c;
        match self.kinematics {
            EtherKinematics::Lorentz => base,
            EtherKinematics::GalileanEther => base * g2 * (1.0 - b2 * theta.sin().powi(2)).sqrt(),
            EtherKinematics::GalileanWithContraction => {
                // the along-wind component of the arm shrinks by 1/gamma
                let (s, c) = theta.sin_cos();
                let length = (1.0 - b2 * c * c).sqrt();
                let (along, across) = (c / self.gamma, s);
                let sin2 = across * across / (along * along + across * across);
                base * g2 * length * (1.0 - b2 * sin2).sqrt()
            }
        }
    }

    /// `t(theta) - t(theta + pi/2)`.
    fn difference(&self, theta: f64) -> f64 {
        match self.kinematics {
            EtherKinematics::Lorentz => 0.0,
            EtherKinematics::GalileanEther => {
                // sqrt(1 - b^2 s^2) - sqrt(1 - b^2 c^2) without cancellation
                let b2 = self.beta * self.beta;
                let (s, c) = theta.sin_cos();
                let (ra, rb) = ((1.0 - b2 * s * s).sqrt(), (1.0 - b2 * c * c).sqrt());
                let cos2 = (c - s) * (c + s);
                2.0 * self.l / self.c * self.gamma * self.gamma * b2 * cos2 / (ra + rb)
            }
            EtherKinematics::GalileanWithContraction => self.round_trip(theta) - self.round_trip(theta + FRAC_PI_2),
        }
    }
}

/// Round-trip times of the arms along and across the wind.
pub fn ether_arm_times(cfg: &InterferometerConfig, k: &PhysicalConstants) -> Result<ArmTimes> {
    let model = ArmModel::new(cfg, k)?;
    Ok(ArmTimes { t_parallel: model.round_trip(0.0), t_perpendicular: model.round_trip(FRAC_PI_2) })
}

/// Arm-time difference `t_arm1 - t_arm2` at the configured orientation.
pub fn arm_time_difference(cfg: &InterferometerConfig, k: &PhysicalConstants) -> Result<f64> {
    Ok(ArmModel::new(cfg, k)?.difference(cfg.orientation))
}

/// Fringe shift seen when the apparatus turns by 90 degrees from
/// `cfg.orientation`: `C (dt(theta) - dt(theta + pi/2)) / lambda`.
pub fn rotation_fringe_shift(cfg: &InterferometerConfig, k: &PhysicalConstants) -> Result<f64> {
    let model = ArmModel::new(cfg, k)?;
    let theta = cfg.orientation;
    let change = model.difference(theta) - model.difference(theta + FRAC_PI_2);
    Ok(k.c * change / cfg.wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub angle: f64,
    pub delta_t: f64,
    pub fringe_shift: f64,
}

/// `count` orientations evenly spaced over `[0, 2 pi)`.
pub fn orientation_sweep(cfg: &InterferometerConfig, count: usize, k: &PhysicalConstants) -> Result<Vec<SweepRow>> {
    (0..count)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / count as f64;
            let at = InterferometerConfig { orientation: angle, ..*cfg };
            Ok(SweepRow {
                angle,
                delta_t: arm_time_difference(&at, k)?,
                fringe_shift: rotation_fringe_shift(&at, k)?,
            })
        })
        .collect()
}

/// CSV: `angle_rad,delta_t_s,fringe_shift`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "angle_rad,delta_t_s,fringe_shift")?;
    for r in rows {
        writeln!(w, "{},{},{}", format_f64(r.angle), format_f64(r.delta_t), format_f64(r.fringe_shift))?;
    }
    Ok(())
}

/// Closed contour with two tubes of length `tube_length`, one carrying the
/// fluid along each beam and one against it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FizeauConfig {
    pub tube_length: f64,
    pub fluid_velocity: f64,
    pub medium: Medium,
    pub wavelength: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FizeauResult {
    /// Counter-flow minus co-flow travel time over both tubes (s).
    pub delta_t: f64,
    pub fringe_shift: f64,
    /// `4 L v (n^2 - 1) / (C lambda)`.
    pub first_order: f64,
}

pub fn fizeau_fringe_shift(cfg: &FizeauConfig, k: &PhysicalConstants) -> Result<FizeauResult> {
    require_positive("tube_length", cfg.tube_length)?;
    require_positive("wavelength", cfg.wavelength)?;
    require_finite("fluid_velocity", cfg.fluid_velocity)?;
    let n = cfg.medium.n;
    let v = cfg.fluid_velocity;
    if v.abs() >= k.c / n {
        return Err(domain(format!("fluid velocity {v} must stay below the in-medium light speed {}", k.c / n)));
    }
    let co = fresnel_drag(&cfg.medium, v, k)?;
    let counter = fresnel_drag(&cfg.medium, -v, k)?;
    // 2L/u_minus - 2L/u_plus = 2L (u_plus - u_minus) / (u_plus u_minus)
    let spread = co.exact_increment - counter.exact_increment;
    let delta_t = 2.0 * cfg.tube_length * spread / (co.exact * counter.exact);
    Ok(FizeauResult {
        delta_t,
        fringe_shift: k.c * delta_t / cfg.wavelength,
        first_order: 4.0 * cfg.tube_length * v * (n * n - 1.0) / (k.c * cfg.wavelength),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mm(v: f64, kinematics: EtherKinematics) -> InterferometerConfig {
        InterferometerConfig { arm_length: 11.0, wavelength: 5e-7, ether_speed: v, orientation: 0.0, kinematics }
    }

    #[test]
    fn rest_schedule() {
        let k = PhysicalConstants::si();
        let s = rest_frame_schedule(0.0, &k).unwrap();
        assert_eq!((s.t1a, s.t2a, s.t1b, s.t2b), (0.0, 0.0, 0.0, 0.0));
        let s = rest_frame_schedule(1.0, &k).unwrap();
        assert_relative_eq!(s.t2a, 6.671_281_9e-9, max_relative = 1e-7);
        assert_eq!(s.t2a - s.t2b, 0.0);
        assert_eq!(s.t1a, s.t1b);
        assert!(rest_frame_schedule(-1.0, &k).is_err());
    }

    #[test]
    fn arm_times() {
        let k = PhysicalConstants::si();
        for kin in [EtherKinematics::GalileanEther, EtherKinematics::Lorentz, EtherKinematics::GalileanWithContraction] {
            let t = ether_arm_times(&InterferometerConfig { arm_length: 1.0, ..mm(0.0, kin) }, &k).unwrap();
            assert_relative_eq!(t.t_parallel, 2.0 / k.c, max_relative = 1e-15);
            assert_relative_eq!(t.t_perpendicular, 2.0 / k.c, max_relative = 1e-15);
        }
        let t = ether_arm_times(&InterferometerConfig { arm_length: 1.0, ..mm(0.5 * k.c, EtherKinematics::GalileanEther) }, &k).unwrap();
        assert_relative_eq!(t.t_parallel / t.t_perpendicular, 2.0 / 3f64.sqrt(), max_relative = 1e-14);
        for v in [1e3, 3e7, 0.9 * k.c] {
            let t = ether_arm_times(&mm(v, EtherKinematics::GalileanWithContraction), &k).unwrap();
            assert_relative_eq!(t.t_parallel, t.t_perpendicular, max_relative = 1e-12);
        }
        assert!(ether_arm_times(&mm(k.c, EtherKinematics::GalileanEther), &k).is_err());
        assert!(ether_arm_times(&mm(-1.0, EtherKinematics::GalileanEther), &k).is_err());
    }

    #[test]
    fn difference_matches_direct_subtraction() {
        let k = PhysicalConstants::si();
        let cfg = mm(0.3 * k.c, EtherKinematics::GalileanEther);
        let model = ArmModel::new(&cfg, &k).unwrap();
        for theta in [0.0, 0.4, 1.3, 2.9] {
            let direct = model.round_trip(theta) - model.round_trip(theta + FRAC_PI_2);
            assert_relative_eq!(model.difference(theta), direct, max_relative = 1e-9, epsilon = 1e-24);
        }
    }

    #[test]
    fn michelson_shift() {
        let k = PhysicalConstants::si();
        assert_eq!(rotation_fringe_shift(&mm(0.0, EtherKinematics::GalileanEther), &k).unwrap(), 0.0);
        let shift = rotation_fringe_shift(&mm(3e4, EtherKinematics::GalileanEther), &k).unwrap();
        // exact path-time oracle, 40 digits
        assert_relative_eq!(shift, 0.440_609_427_712_479_07, max_relative = 1e-9);
        assert!((shift - 0.44).abs() < 0.01);
        let lorentz = rotation_fringe_shift(&mm(3e4, EtherKinematics::Lorentz), &k).unwrap();
        assert!(lorentz.abs() < 1e-12);
        let contr = rotation_fringe_shift(&mm(3e4, EtherKinematics::GalileanWithContraction), &k).unwrap();
        // relative to the number of wavelengths in a round trip
        assert!(contr.abs() < 1e-12 * 2.0 * 11.0 / 5e-7, "{contr}");
    }

    #[test]
    fn swapping_arms_negates_shift() {
        let k = PhysicalConstants::si();
        for kin in [EtherKinematics::GalileanEther, EtherKinematics::Lorentz, EtherKinematics::GalileanWithContraction] {
            for theta in [0.0, 0.3, 1.1] {
                let a = InterferometerConfig { orientation: theta, ..mm(0.01 * k.c, kin) };
                let b = InterferometerConfig { orientation: theta + FRAC_PI_2, ..a };
                let (sa, sb) = (rotation_fringe_shift(&a, &k).unwrap(), rotation_fringe_shift(&b, &k).unwrap());
                assert!((sa + sb).abs() <= 1e-9 * sa.abs().max(1e-3), "{kin:?} {sa} {sb}");
            }
        }
    }

    #[test]
    fn sweep_rows_and_csv() {
        let k = PhysicalConstants::si();
        let rows = orientation_sweep(&mm(3e4, EtherKinematics::GalileanEther), 4, &k).unwrap();
        assert_eq!(rows.len(), 4);
        assert_relative_eq!(rows[1].angle, FRAC_PI_2, max_relative = 1e-15);
        assert_relative_eq!(rows[0].fringe_shift, -rows[1].fringe_shift, max_relative = 1e-9);
        let mut out = Vec::new();
        write_sweep_csv(&rows, &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().next().unwrap(), "angle_rad,delta_t_s,fringe_shift");
    }

    fn fizeau(v: f64, n: f64) -> FizeauConfig {
        FizeauConfig { tube_length: 1.487, fluid_velocity: v, medium: Medium::from_index(n).unwrap(), wavelength: 526e-9 }
    }

    #[test]
    fn fizeau_examples() {
        let k = PhysicalConstants::si();
        assert_eq!(fizeau_fringe_shift(&fizeau(0.0, 1.333), &k).unwrap().fringe_shift, 0.0);
        assert_eq!(fizeau_fringe_shift(&fizeau(5.0, 1.0), &k).unwrap().fringe_shift, 0.0);
        let r = fizeau_fringe_shift(&fizeau(7.059, 1.333), &k).unwrap();
        // oracle: 2L/u_minus - 2L/u_plus with exact composition, 40 digits
        assert_relative_eq!(r.fringe_shift, 0.206_855_306_760_785_01, max_relative = 1e-9);
        assert!((r.fringe_shift / r.first_order - 1.0).abs() < 7.059 / k.c * 10.0);
        let neg = fizeau_fringe_shift(&fizeau(-7.059, 1.333), &k).unwrap();
        assert_eq!(neg.fringe_shift, -r.fringe_shift);
        assert!(fizeau_fringe_shift(&fizeau(k.c / 1.2, 1.333), &k).is_err());
    }
}
