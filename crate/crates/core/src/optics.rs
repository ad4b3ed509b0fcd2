//! Dielectric response, light drag in moving media and dipole transitions.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, require_finite, require_positive, Result};
use crate::kinematics::compose_velocities;
use crate::numfmt::format_f64;

/// Relative permittivity and permeability; `n = sqrt(epsilon mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub epsilon: f64,
    pub mu: f64,
    pub n: f64,
}

impl Medium {
    pub fn new(epsilon: f64, mu: f64) -> Result<Self> {
        require_positive("epsilon", epsilon)?;
        require_positive("mu", mu)?;
        Ok(Self { epsilon, mu, n: (epsilon * mu).sqrt() })
    }

    /// Non-magnetic medium with the given index.
    pub fn from_index(n: f64) -> Result<Self> {
        require_positive("n", n)?;
        Ok(Self { epsilon: n * n, mu: 1.0, n })
    }

    pub fn vacuum() -> Self {
        Self { epsilon: 1.0, mu: 1.0, n: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceParams {
    /// Oscillator density n(q) applied to every listed mode (1/m^3).
    pub oscillator_density: f64,
    pub omega_c: f64,
    pub m_osc: f64,
    /// Damping time constant (s).
    pub tau_damp: f64,
}

/// `eps = 1 + sum_q 4 pi n(q) (w - wc) / (m {4 (w - wc)^2 + tau^2 w^4})`,
/// evaluated literally for each `(q, w)` pair.
///
/// The numerator is odd in the detuning and `tau^2 w^4` is not
/// dimensionally a squared frequency; both are kept as written.
pub fn epsilon_dispersion(omega_modes: &[(f64, f64)], params: &ResonanceParams) -> Result<f64> {
    let p = params;
    if p.m_osc == 0.0 {
        return Err(domain("oscillator mass m_osc must be non-zero"));
    }
    for (name, v) in [
        ("oscillator_density", p.oscillator_density),
        ("omega_c", p.omega_c),
        ("m_osc", p.m_osc),
        ("tau_damp", p.tau_damp),
    ] {
        require_finite(name, v)?;
        if v < 0.0 {
            return Err(domain(format!("{name} must be non-negative, got {v}")));
        }
    }
    let mut eps = 1.0;
    for &(_q, w) in omega_modes {
        require_finite("omega", w)?;
        let detuning = w - p.omega_c;
        if detuning == 0.0 || p.oscillator_density == 0.0 {
            continue;
        }
        let denom = p.m_osc * (4.0 * detuning * detuning + p.tau_damp * p.tau_damp * w.powi(4));
        eps += 4.0 * PI * p.oscillator_density * detuning / denom;
    }
    Ok(eps)
}

/// `v = C / sqrt(epsilon mu)`.
pub fn phase_velocity(medium: &Medium, k: &PhysicalConstants) -> f64 {
    k.c / (medium.epsilon * medium.mu).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub omega: f64,
    pub epsilon: f64,
    /// `nan` where `epsilon <= 0`.
    pub n: f64,
    pub phase_velocity: f64,
}

/// Single-mode permittivity, index and phase velocity at each frequency.
pub fn dispersion_sweep(omegas: &[f64], params: &ResonanceParams, k: &PhysicalConstants) -> Result<Vec<SweepPoint>> {
    omegas
        .iter()
        .map(|&omega| {
            let epsilon = epsilon_dispersion(&[(0.0, omega)], params)?;
            let (n, phase_velocity) = if epsilon > 0.0 {
                let med = Medium::new(epsilon, 1.0)?;
                (med.n, phase_velocity(&med, k))
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(SweepPoint { omega, epsilon, n, phase_velocity })
        })
        .collect()
}

/// CSV: `omega,epsilon,n,phase_velocity`.
pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], mut w: W) -> io::Result<()> {
    writeln!(w, "omega,epsilon,n,phase_velocity")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{}",
            format_f64(p.omega),
            format_f64(p.epsilon),
            format_f64(p.n),
            format_f64(p.phase_velocity)
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DragResult {
    /// `C/n + v (1 - 1/n^2)`.
    pub approx: f64,
    /// Relativistic composition of `C/n` with the medium velocity.
    pub exact: f64,
    pub drag_coefficient: f64,
    /// `exact - C/n`, evaluated without cancellation as
    /// `v (1 - 1/n^2) / (1 + v/(n C))`.
    pub exact_increment: f64,
    /// `exact - approx`, evaluated without cancellation.
    pub residual: f64,
}

/// Light speed in a medium of index `n` moving with `v_medium` along the
/// beam (negative for counter-flow).
pub fn fresnel_drag(medium: &Medium, v_medium: f64, k: &PhysicalConstants) -> Result<DragResult> {
    require_finite("v_medium", v_medium)?;
    if v_medium.abs() >= k.c {
        return Err(domain(format!("|v_medium| must be below C, got {v_medium}")));
    }
    let n = medium.n;
    if n < 1.0 {
        return Err(domain(format!("refractive index must be >= 1, got {n}")));
    }
    let c = k.c;
    let u = c / n;
    let drag_coefficient = 1.0 - 1.0 / (n * n);
    let approx = u + v_medium * drag_coefficient;
    let exact = compose_velocities(Vector3::new(u, 0.0, 0.0), -v_medium, k)?.x;
    let x = v_medium / (n * c);
    let exact_increment = v_medium * drag_coefficient / (1.0 + x);
    let residual = -v_medium * drag_coefficient * x / (1.0 + x);
    Ok(DragResult { approx, exact, drag_coefficient, exact_increment, residual })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub omega12: f64,
    /// `|<1|r|2>|` (m).
    pub r12: f64,
    /// Ambient photon occupation `n`.
    pub photon_count: f64,
}

impl Transition {
    pub fn new(omega12: f64, r12: f64, photon_count: f64) -> Result<Self> {
        require_positive("omega12", omega12)?;
        for (name, v) in [("r12", r12), ("photon_count", photon_count)] {
            require_finite(name, v)?;
            if v < 0.0 {
                return Err(domain(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(Self { omega12, r12, photon_count })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionDirection {
    Emission,
    Absorption,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRate {
    /// Transitions per second.
    pub p12: f64,
    /// Radiated power, `p12 hbar omega12` (W).
    pub intensity: f64,
}

/// Dipole rate `(4/3) e^2 omega^3 |r|^2 / (hbar C^3)` in Gaussian form
/// (`e^2 -> e^2 / (4 pi eps0)`), weighted by `n + 1` for emission and `n`
/// for absorption.
pub fn transition_rate(t: &Transition, direction: TransitionDirection, k: &PhysicalConstants) -> Result<TransitionRate> {
    let t = Transition::new(t.omega12, t.r12, t.photon_count)?;
    let base = 4.0 / 3.0 * k.gaussian_charge_squared() / (k.hbar * k.c.powi(3)) * t.omega12.powi(3) * t.r12 * t.r12;
    let weight = match direction {
        TransitionDirection::Emission => t.photon_count + 1.0,
        TransitionDirection::Absorption => t.photon_count,
    };
    let p12 = base * weight;
    Ok(TransitionRate { p12, intensity: p12 * k.hbar * t.omega12 })
}
