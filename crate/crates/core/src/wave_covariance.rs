//! Finite-difference check of the scalar wave equation under coordinate
//! substitutions, plus plane-wave Doppler transforms.
//!
//! Fields are sampled analytically on uniform 1+1 dimensional grids. A
//! transformed field is evaluated by substituting the inverse coordinate map
//! into the original field, so no interpolation error enters the comparison.
//! The d'Alembertian is estimated with second-order central differences on
//! interior points.

use std::io::{self, Write};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, require_finite, require_positive, Result};
use crate::kinematics::{gamma_factor, Boost};

/// Smallest grid extent accepted by [`dalembertian_residual`].
pub const MIN_GRID_POINTS: usize = 5;

/// A scalar field defined on `(t, x)`.
pub trait ScalarField {
    fn value(&self, t: f64, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub k: Vector3<f64>,
    pub omega: f64,
    pub amplitude: f64,
    pub phase0: f64,
    /// Set when the wave was built on the light cone; preserved by boosts.
    pub luminal: bool,
}

impl PlaneWave {
    pub fn new(k: Vector3<f64>, omega: f64, amplitude: f64, phase0: f64) -> Self {
        Self { k, omega, amplitude, phase0, luminal: false }
    }

    /// A wave with `|k| = omega / C` travelling along `direction`.
    pub fn luminal(direction: Vector3<f64>, omega: f64, amplitude: f64, phase0: f64, c: &PhysicalConstants) -> Result<Self> {
        let norm = direction.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(domain("plane-wave direction must be a non-zero finite vector"));
        }
        require_finite("omega", omega)?;
        Ok(Self { k: direction / norm * (omega / c.c), omega, amplitude, phase0, luminal: true })
    }

    /// Luminal wave along +x with wavelength `lambda`.
    pub fn luminal_with_wavelength(lambda: f64, c: &PhysicalConstants) -> Result<Self> {
        require_positive("wavelength", lambda)?;
        Self::luminal(Vector3::x(), 2.0 * std::f64::consts::PI * c.c / lambda, 1.0, 0.0, c)
    }

    /// `k . r - omega t + phase0`.
    pub fn phase(&self, t: f64, r: Vector3<f64>) -> f64 {
        self.k.dot(&r) - self.omega * t + self.phase0
    }

    /// Relative mismatch `| |k| C - |omega| | / |omega|`.
    pub fn light_cone_mismatch(&self, c: &PhysicalConstants) -> f64 {
        (self.k.norm() * c.c - self.omega.abs()).abs() / self.omega.abs()
    }
}

impl ScalarField for PlaneWave {
    fn value(&self, t: f64, x: f64) -> f64 {
        self.amplitude * (self.k.x * x - self.omega * t + self.phase0).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub t_pow: u32,
    pub x_pow: u32,
}

/// `sum coeff (t - t0)^p (x - x0)^q`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub t0: f64,
    pub x0: f64,
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn constant(value: f64) -> Self {
        Self { terms: vec![Monomial { coeff: value, t_pow: 0, x_pow: 0 }], ..Default::default() }
    }

    pub fn centered(t0: f64, x0: f64, terms: Vec<Monomial>) -> Self {
        Self { t0, x0, terms }
    }
}

impl ScalarField for Polynomial {
    fn value(&self, t: f64, x: f64) -> f64 {
        let (dt, dx) = (t - self.t0, x - self.x0);
        self.terms
            .iter()
            .map(|m| m.coeff * dt.powi(m.t_pow as i32) * dx.powi(m.x_pow as i32))
            .sum()
    }
}

/// Anything [`sample_field`] knows how to fill a grid from.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    Plane(PlaneWave),
    Polynomial(Polynomial),
}

impl ScalarField for FieldSpec {
    fn value(&self, t: f64, x: f64) -> f64 {
        match self {
            FieldSpec::Plane(w) => w.value(t, x),
            FieldSpec::Polynomial(p) => p.value(t, x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub nt: usize,
    pub nx: usize,
    pub dt: f64,
    pub dx: f64,
    pub t0: f64,
    pub x0: f64,
}

impl GridGeometry {
    /// One wavelength by one period, `points_per_wavelength` cells in x and
    /// `courant = C dt / dx`.
    ///
    /// A Courant number of exactly 1 makes the central stencil exact for
    /// luminal waves, which hides the truncation order; use something else.
    pub fn per_wavelength(wavelength: f64, points_per_wavelength: usize, courant: f64, c: &PhysicalConstants) -> Result<Self> {
        require_positive("wavelength", wavelength)?;
        require_positive("courant", courant)?;
        if points_per_wavelength < MIN_GRID_POINTS {
            return Err(domain(format!("need at least {MIN_GRID_POINTS} points per wavelength")));
        }
        let dx = wavelength / points_per_wavelength as f64;
        let dt = courant * dx / c.c;
        let nt = (points_per_wavelength as f64 / courant).round() as usize + 1;
        Ok(Self { nt, nx: points_per_wavelength + 1, dt, dx, t0: 0.0, x0: 0.0 })
    }

    fn validate(&self) -> Result<()> {
        if self.nt == 0 || self.nx == 0 {
            return Err(domain("grid must have at least one sample in each axis"));
        }
        require_positive("dt", self.dt)?;
        require_positive("dx", self.dx)?;
        require_finite("t0", self.t0)?;
        require_finite("x0", self.x0)?;
        Ok(())
    }
}

/// Row-major samples: row `i` is time `t0 + i dt`, column `j` is `x0 + j dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub values: Vec<f64>,
    pub geometry: GridGeometry,
}

impl FieldGrid {
    pub fn nt(&self) -> usize {
        self.geometry.nt
    }

    pub fn nx(&self) -> usize {
        self.geometry.nx
    }

    pub fn get(&self, it: usize, ix: usize) -> f64 {
        self.values[it * self.geometry.nx + ix]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.geometry.nx)
    }

    /// CSV with a `# dt=.. dx=.. t0=.. x0=..` header line followed by one
    /// comma-separated line per time row.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let g = &self.geometry;
        writeln!(w, "# dt={:.16e} dx={:.16e} t0={:.16e} x0={:.16e}", g.dt, g.dx, g.t0, g.x0)?;
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

pub fn sample_field<F: ScalarField + ?Sized>(field: &F, geometry: &GridGeometry) -> Result<FieldGrid> {
    geometry.validate()?;
    let mut values = Vec::with_capacity(geometry.nt * geometry.nx);
    for it in 0..geometry.nt {
        let t = geometry.t0 + it as f64 * geometry.dt;
        for ix in 0..geometry.nx {
            let x = geometry.x0 + ix as f64 * geometry.dx;
            values.push(field.value(t, x));
        }
    }
    Ok(FieldGrid { values, geometry: *geometry })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    /// Interior points only; origin shifted by one step in each axis.
    pub grid: FieldGrid,
    /// Root-mean-square over the interior.
    pub l2_norm: f64,
}

/// `d2phi/dx2 - (1/C^2) d2phi/dt2` on interior points.
pub fn dalembertian_residual(grid: &FieldGrid, c: &PhysicalConstants) -> Result<Residual> {
    let g = grid.geometry;
    if g.nt < MIN_GRID_POINTS || g.nx < MIN_GRID_POINTS {
        return Err(domain(format!(
            "grid {}x{} too small, need at least {MIN_GRID_POINTS} points per axis",
            g.nt, g.nx
        )));
    }
    let inv_dx2 = 1.0 / (g.dx * g.dx);
    let inv_cdt2 = 1.0 / (c.c * c.c * g.dt * g.dt);
    let (nt, nx) = (g.nt - 2, g.nx - 2);
    let mut values = Vec::with_capacity(nt * nx);
    let mut sum_sq = 0.0;
    for it in 1..g.nt - 1 {
        for ix in 1..g.nx - 1 {
            let centre = grid.get(it, ix);
            let dxx = (grid.get(it, ix + 1) - 2.0 * centre + grid.get(it, ix - 1)) * inv_dx2;
            let dtt = (grid.get(it + 1, ix) - 2.0 * centre + grid.get(it - 1, ix)) * inv_cdt2;
            let r = dxx - dtt;
            sum_sq += r * r;
            values.push(r);
        }
    }
    let l2_norm = (sum_sq / values.len() as f64).sqrt();
    let geometry = GridGeometry { nt, nx, t0: g.t0 + g.dt, x0: g.x0 + g.dx, ..g };
    Ok(Residual { grid: FieldGrid { values, geometry }, l2_norm })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    Lorentz,
    Voigt,
    Galilean,
}

impl TransformKind {
    pub const ALL: [TransformKind; 3] = [TransformKind::Lorentz, TransformKind::Voigt, TransformKind::Galilean];
}

/// `phi'(t', x') = phi(t(t', x'), x(t', x'))` for a frame moving with `v`.
#[derive(Debug, Clone)]
pub struct TransformedField<'a, F: ?Sized> {
    field: &'a F,
    kind: TransformKind,
    v: f64,
    c: f64,
    gamma: f64,
}

impl<'a, F: ScalarField + ?Sized> TransformedField<'a, F> {
    pub fn new(field: &'a F, kind: TransformKind, v: f64, c: &PhysicalConstants) -> Result<Self> {
        let gamma = gamma_factor(v, c)?;
        Ok(Self { field, kind, v, c: c.c, gamma })
    }

    /// Unprimed `(t, x)` for primed `(t', x')`.
    pub fn source_coordinates(&self, tp: f64, xp: f64) -> (f64, f64) {
        let (v, c2) = (self.v, self.c * self.c);
        match self.kind {
            TransformKind::Lorentz => (self.gamma * (tp + v * xp / c2), self.gamma * (xp + v * tp)),
            TransformKind::Voigt => {
                // inverse of [[1, -v/C^2], [-v, 1]] has determinant 1/gamma^2
                let g2 = self.gamma * self.gamma;
                (g2 * (tp + v * xp / c2), g2 * (xp + v * tp))
            }
            TransformKind::Galilean => (tp, xp + v * tp),
        }
    }
}

impl<F: ScalarField + ?Sized> ScalarField for TransformedField<'_, F> {
    fn value(&self, tp: f64, xp: f64) -> f64 {
        let (t, x) = self.source_coordinates(tp, xp);
        self.field.value(t, x)
    }
}

pub fn transformed_residual(
    wave: &PlaneWave,
    v: f64,
    kind: TransformKind,
    geometry: &GridGeometry,
    c: &PhysicalConstants,
) -> Result<f64> {
    let field = TransformedField::new(wave, kind, v, c)?;
    Ok(dalembertian_residual(&sample_field(&field, geometry)?, c)?.l2_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub untransformed: f64,
    pub lorentz: f64,
    pub voigt: f64,
    pub galilean: f64,
}

impl CovarianceReport {
    pub fn get(&self, kind: TransformKind) -> f64 {
        match kind {
            TransformKind::Lorentz => self.lorentz,
            TransformKind::Voigt => self.voigt,
            TransformKind::Galilean => self.galilean,
        }
    }
}

/// Residual norms of the original wave and of its three transformed versions
/// resampled on the same grid geometry.
pub fn covariance_comparison(wave: &PlaneWave, v: f64, geometry: &GridGeometry, c: &PhysicalConstants) -> Result<CovarianceReport> {
    let untransformed = dalembertian_residual(&sample_field(wave, geometry)?, c)?.l2_norm;
    let run = |kind| transformed_residual(wave, v, kind, geometry, c);
    Ok(CovarianceReport {
        untransformed,
        lorentz: run(TransformKind::Lorentz)?,
        voigt: run(TransformKind::Voigt)?,
        galilean: run(TransformKind::Galilean)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RefinementLevel {
    pub points_per_wavelength: usize,
    pub dx: f64,
    pub report: CovarianceReport,
}

/// Courant number used by [`refinement_study`].
pub const STUDY_COURANT: f64 = 0.5;

/// Covariance comparison repeated on a sequence of grid refinements of one
/// wavelength by one period of `wave`.
pub fn refinement_study(
    wave: &PlaneWave,
    v: f64,
    points_per_wavelength: &[usize],
    c: &PhysicalConstants,
) -> Result<Vec<RefinementLevel>> {
    let kx = wave.k.x.abs();
    if !(kx > 0.0) {
        return Err(domain("refinement study needs a wave with non-zero k_x"));
    }
    let wavelength = 2.0 * std::f64::consts::PI / kx;
    points_per_wavelength
        .iter()
        .map(|&ppw| {
            let geometry = GridGeometry::per_wavelength(wavelength, ppw, STUDY_COURANT, c)?;
            Ok(RefinementLevel { points_per_wavelength: ppw, dx: geometry.dx, report: covariance_comparison(wave, v, &geometry, c)? })
        })
        .collect()
}

/// Least-squares slope of `log(norm)` against `log(dx)`.
pub fn convergence_order(dx: &[f64], norms: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = dx.iter().zip(norms).map(|(h, r)| (h.ln(), r.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Richardson extrapolation of the two finest levels to `dx -> 0`, assuming
/// an error term of the given order and a refinement ratio taken from `dx`.
pub fn richardson_limit(dx_coarse: f64, norm_coarse: f64, dx_fine: f64, norm_fine: f64, order: f64) -> f64 {
    let r = (dx_coarse / dx_fine).powf(order);
    norm_fine + (norm_fine - norm_coarse) / (r - 1.0)
}

/// Standard four-vector transform of `(omega / C, k)` into the boosted frame.
/// The phase `k . r - omega t` is invariant.
pub fn transform_plane_wave(wave: &PlaneWave, b: &Boost) -> PlaneWave {
    let (v, g, c) = (b.velocity(), b.gamma(), b.speed_of_light());
    let omega = g * (wave.omega - v * wave.k.x);
    let kx = g * (wave.k.x - v * wave.omega / (c * c));
    PlaneWave { k: Vector3::new(kx, wave.k.y, wave.k.z), omega, ..*wave }
}

/// Frequency heard by an observer from a sound source; velocities are
/// positive when moving toward the counterpart.
pub fn acoustic_doppler(f: f64, v_source: f64, v_observer: f64, c_sound: f64) -> Result<f64> {
    require_positive("c_sound", c_sound)?;
    require_finite("f", f)?;
    require_finite("v_observer", v_observer)?;
    require_finite("v_source", v_source)?;
    if v_source.abs() >= c_sound {
        return Err(domain(format!("|v_source| must be below the sound speed {c_sound}")));
    }
    Ok(f * (c_sound + v_observer) / (c_sound - v_source))
}

/// Longitudinal light Doppler shift for a closing speed `v` (positive when
/// approaching). Depends only on the relative velocity.
pub fn light_doppler(f: f64, v: f64, c: &PhysicalConstants) -> Result<f64> {
    gamma_factor(v, c)?;
    Ok(f * ((c.c + v) / (c.c - v)).sqrt())
}
