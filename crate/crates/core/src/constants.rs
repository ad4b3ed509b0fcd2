//! Physical constant profiles.

use serde::{Deserialize, Serialize};

use crate::error::{domain, require_positive, Result};

/// Speed of light, elementary charge, vacuum permittivity and permeability,
/// and the reduced Planck constant.
///
/// `eps0` is always stored so that `c == 1 / sqrt(eps0 * mu0)` closes to
/// rounding; [`PhysicalConstants::new`] enforces it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub e: f64,
    pub eps0: f64,
    pub mu0: f64,
    pub hbar: f64,
}

/// Relative tolerance on `c * sqrt(eps0 * mu0) == 1`.
const VACUUM_IDENTITY_TOL: f64 = 1e-12;

impl PhysicalConstants {
    pub fn new(c: f64, e: f64, eps0: f64, mu0: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("e", e), ("eps0", eps0), ("mu0", mu0), ("hbar", hbar)] {
            require_positive(name, v)?;
        }
        let mismatch = (c * (eps0 * mu0).sqrt() - 1.0).abs();
        if mismatch > VACUUM_IDENTITY_TOL {
            return Err(domain(format!(
                "c must equal 1/sqrt(eps0*mu0) to {VACUUM_IDENTITY_TOL:e}, mismatch {mismatch:e}"
            )));
        }
        Ok(Self { c, e, eps0, mu0, hbar })
    }

    /// SI values (2019 exact definitions; `mu0` from CODATA 2018, `eps0` derived).
    pub fn si() -> Self {
        let c = 299_792_458.0;
        let mu0 = 1.256_637_062_12e-6;
        Self {
            c,
            e: 1.602_176_634e-19,
            eps0: 1.0 / (mu0 * c * c),
            mu0,
            hbar: 1.054_571_817e-34,
        }
    }

    /// Heaviside-Lorentz natural units: `c = hbar = eps0 = mu0 = 1`,
    /// `e = sqrt(4 pi alpha)`.
    pub fn natural() -> Self {
        const ALPHA: f64 = 7.297_352_569_3e-3;
        Self {
            c: 1.0,
            e: (4.0 * std::f64::consts::PI * ALPHA).sqrt(),
            eps0: 1.0,
            mu0: 1.0,
            hbar: 1.0,
        }
    }

    /// Vacuum impedance `sqrt(mu0 / eps0)`.
    pub fn impedance(&self) -> f64 {
        (self.mu0 / self.eps0).sqrt()
    }

    /// `e^2` in Gaussian form, `e^2 / (4 pi eps0)`.
    pub fn gaussian_charge_squared(&self) -> f64 {
        self.e * self.e / (4.0 * std::f64::consts::PI * self.eps0)
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::si()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_satisfy_vacuum_identity() {
        for k in [PhysicalConstants::si(), PhysicalConstants::natural()] {
            let rebuilt = PhysicalConstants::new(k.c, k.e, k.eps0, k.mu0, k.hbar).unwrap();
            assert_eq!(rebuilt, k);
        }
    }

    #[test]
    fn si_impedance() {
        let z = PhysicalConstants::si().impedance();
        assert!((z - 376.730_313_668).abs() < 1e-6, "{z}");
    }

    #[test]
    fn rejects_inconsistent_or_negative() {
        assert!(PhysicalConstants::new(2.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(PhysicalConstants::new(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }
}
