//! Dipole-lattice ("dynamide") vacuum model.
//!
//! Each lattice site holds a neutral pair of opposite point charges with an
//! inertial mass `theta`. The pair is held together by an on-site spring
//! `chi_tilde` and neighbouring sites are coupled by a spring `chi`. The
//! classical 1-D chain has the dispersion
//!
//! ```text
//! omega(q)^2 = 2 chi_tilde / theta + (4 chi / theta) sin^2(q a / 2)
//! ```
//!
//! Field amplitudes are computed as prefactors of single quantized modes.
//! Creation/annihilation operators are replaced by a real occupation number
//! and a real phase; only prefactors and `(n + 1/2)` expectation values are
//! produced.
//!
//! Units note: the E, A and H prefactors use the `2 pi hbar omega / Omega`
//! form (Gaussian-style `2 pi`) with SI `eps0`/`mu0`. The ratios
//! `E0 / A0 = omega`, `E0 / H0 = sqrt(mu0 / eps0)` and `P0 / eps0 = E0`
//! close regardless of that choice.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{domain, require_finite, require_positive, Error, Result};
use crate::numfmt::format_f64;

/// Tolerance on unit length and orthogonality of mode vectors.
const MODE_VECTOR_TOL: f64 = 1e-12;

/// Modes whose amplitude stays below this fraction of the loudest mode are
/// reported as unmeasured.
const SILENT_MODE_RATIO: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Periodic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamideChainConfig {
    /// Number of sites.
    pub n: usize,
    /// Inertial mass of each oscillating charge (kg).
    pub theta: f64,
    /// Intra-dynamide (on-site) spring constant (N/m).
    pub chi_tilde: f64,
    /// Nearest-neighbour spring constant (N/m).
    pub chi: f64,
    /// Lattice spacing (m).
    pub a: f64,
    /// Cell volume (m^3).
    pub omega0: f64,
    pub boundary: Boundary,
    /// Leapfrog step (s).
    pub dt: f64,
    pub steps: usize,
    pub seed: u64,
    /// Steps between samples of the normal-mode coordinates.
    pub sample_stride: usize,
    /// Steps between trajectory snapshots; 0 records only the initial state.
    pub record_stride: usize,
}

impl DynamideChainConfig {
    /// Default integration: `dt = 0.1 / omega_max`, 10^5 steps, sampling every
    /// 10 steps, 100 trajectory snapshots.
    pub fn new(n: usize, theta: f64, chi_tilde: f64, chi: f64, a: f64, omega0: f64) -> Self {
        let mut cfg = Self {
            n,
            theta,
            chi_tilde,
            chi,
            a,
            omega0,
            boundary: Boundary::Periodic,
            dt: 0.0,
            steps: 100_000,
            seed: 0,
            sample_stride: 10,
            record_stride: 1_000,
        };
        cfg.dt = 0.1 / cfg.max_frequency();
        cfg
    }

    pub fn intra_frequency(&self) -> f64 {
        (2.0 * self.chi_tilde / self.theta).sqrt()
    }

    /// Band edge `omega(pi / a)`.
    pub fn max_frequency(&self) -> f64 {
        (2.0 * self.chi_tilde / self.theta + 4.0 * self.chi / self.theta).sqrt()
    }

    /// `Omega = N Omega_0`.
    pub fn volume(&self) -> f64 {
        self.n as f64 * self.omega0
    }

    /// Wavevector of mode index `m`, folded into `(-pi/a, pi/a]`.
    pub fn wavevector(&self, m: usize) -> f64 {
        let n = self.n as i64;
        let mut j = (m as i64).rem_euclid(n);
        if 2 * j > n {
            j -= n;
        }
        2.0 * PI * j as f64 / (n as f64 * self.a)
    }

    pub fn analytic_frequency(&self, q: f64) -> f64 {
        let s = (0.5 * q * self.a).sin();
        (2.0 * self.chi_tilde / self.theta + 4.0 * self.chi / self.theta * s * s).sqrt()
    }

    fn validate_physical(&self) -> Result<()> {
        require_positive("theta", self.theta)?;
        require_positive("omega0", self.omega0)?;
        if self.n == 0 {
            return Err(domain("chain needs at least one site"));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(domain(format!("chain needs at least 2 sites, got {}", self.n)));
        }
        for (name, v) in [
            ("theta", self.theta),
            ("chi_tilde", self.chi_tilde),
            ("chi", self.chi),
            ("a", self.a),
            ("omega0", self.omega0),
        ] {
            require_positive(name, v)?;
        }
        require_positive("dt", self.dt)?;
        if self.sample_stride == 0 {
            return Err(domain("sample_stride must be at least 1"));
        }
        let w_max = self.max_frequency();
        if self.dt * w_max >= 2.0 {
            return Err(Error::Precondition(format!(
                "dt = {:e} violates the leapfrog bound dt < 2/omega_max = {:e}",
                self.dt,
                2.0 / w_max
            )));
        }
        if w_max * self.dt * self.sample_stride as f64 >= PI {
            return Err(Error::Precondition(format!(
                "sample_stride {} aliases the band edge (need omega_max dt stride < pi)",
                self.sample_stride
            )));
        }
        Ok(())
    }
}

/// `omega_tilde = sqrt(2 chi_tilde / theta)`.
pub fn intra_frequency(chi_tilde: f64, theta: f64) -> Result<f64> {
    intra_frequency_sq(chi_tilde, theta).map(f64::sqrt)
}

pub fn intra_frequency_sq(chi_tilde: f64, theta: f64) -> Result<f64> {
    require_positive("chi_tilde", chi_tilde)?;
    require_positive("theta", theta)?;
    Ok(2.0 * chi_tilde / theta)
}

/// `omega = sqrt(4 chi / (2 theta))`; with `chi = 2 chi_tilde` this gives
/// `omega^2 = 2 omega_tilde^2`.
pub fn collective_frequency(chi: f64, theta: f64) -> Result<f64> {
    collective_frequency_sq(chi, theta).map(f64::sqrt)
}

/// Squared forms avoid the sqrt rounding, so the factor of 2 between them is
/// exact in floating point whenever `chi = 2 chi_tilde`.
pub fn collective_frequency_sq(chi: f64, theta: f64) -> Result<f64> {
    require_positive("chi", chi)?;
    require_positive("theta", theta)?;
    Ok(4.0 * chi / (2.0 * theta))
}

/// Inertial mass fixed by the Coulomb energy of a cell,
/// `theta omega^2 = 4 e^2 / (4 pi Omega_0 eps0)`.
pub fn theta_from_cell(omega0: f64, omega: f64, k: &PhysicalConstants) -> Result<f64> {
    require_positive("omega0", omega0)?;
    require_positive("omega", omega)?;
    Ok(4.0 * k.e * k.e / (4.0 * PI * omega0 * k.eps0 * omega * omega))
}

/// The alternate form `theta C^2 = e^2 / (4 pi Omega_0 q^2 eps0)`.
///
/// It agrees with [`theta_from_cell`] only when `omega = 2 C q`.
pub fn theta_from_wavevector(omega0: f64, q: f64, k: &PhysicalConstants) -> Result<f64> {
    require_positive("omega0", omega0)?;
    require_positive("q", q)?;
    Ok(k.e * k.e / (4.0 * PI * omega0 * q * q * k.eps0 * k.c * k.c))
}

/// A single quantized mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Wavevector magnitude (rad/m).
    pub q: f64,
    pub omega: f64,
    /// Occupation number `n_q`.
    pub occupation: f64,
    /// Propagation direction `n_q`.
    pub direction: Vector3<f64>,
    /// Polarization `I`, perpendicular to `direction`.
    pub polarization: Vector3<f64>,
    /// Classical phase standing in for the operator phase.
    pub phase: f64,
}

impl Mode {
    pub fn new(q: f64, omega: f64, occupation: f64, direction: Vector3<f64>, polarization: Vector3<f64>) -> Result<Self> {
        require_finite("q", q)?;
        require_finite("omega", omega)?;
        require_finite("occupation", occupation)?;
        if occupation < 0.0 {
            return Err(domain(format!("occupation must be >= 0, got {occupation}")));
        }
        for (name, u) in [("direction", &direction), ("polarization", &polarization)] {
            if (u.norm() - 1.0).abs() > MODE_VECTOR_TOL {
                return Err(domain(format!("{name} must be a unit vector (|{name}| = {})", u.norm())));
            }
        }
        let overlap = direction.dot(&polarization);
        if overlap.abs() > MODE_VECTOR_TOL {
            return Err(domain(format!("polarization must be transverse to direction (dot = {overlap:e})")));
        }
        Ok(Self { q, omega, occupation, direction, polarization, phase: 0.0 })
    }

    /// A mode on the light cone, `q = omega / C`.
    pub fn luminal(omega: f64, occupation: f64, direction: Vector3<f64>, polarization: Vector3<f64>, k: &PhysicalConstants) -> Result<Self> {
        Self::new(omega / k.c, omega, occupation, direction, polarization)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }
}

/// Single-mode prefactors of polarization, electric intensity, vector
/// potential and magnetic intensity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeAmplitudes {
    pub p0: f64,
    pub e0: f64,
    pub a0: f64,
    pub h0: f64,
}

pub fn mode_amplitudes(mode: &Mode, cfg: &DynamideChainConfig, k: &PhysicalConstants) -> Result<ModeAmplitudes> {
    cfg.validate_physical()?;
    let w = mode.omega;
    if !(w > 0.0) {
        return Err(domain(format!("mode frequency must be positive (amplitudes diverge), got {w}")));
    }
    let volume = cfg.volume();
    let p0 = 2.0 * k.e / (cfg.omega0 * (cfg.n as f64).sqrt()) * (k.hbar / (2.0 * cfg.theta * w)).sqrt();
    let e0 = (2.0 * PI * k.hbar * w / (volume * k.eps0)).sqrt();
    let a0 = (2.0 * PI * k.hbar / (volume * w * k.eps0)).sqrt();
    let h0 = (2.0 * PI * k.hbar * w / (volume * k.mu0)).sqrt();
    Ok(ModeAmplitudes { p0, e0, a0, h0 })
}

/// Ratio of the `mu0` form of the vector-potential prefactor,
/// `sqrt(2 pi hbar omega mu0 / (Omega q^2))`, to the `eps0` form. Equals
/// `omega / (C q)`: 1 on the light cone.
pub fn g2_consistency(mode: &Mode, cfg: &DynamideChainConfig, k: &PhysicalConstants) -> Result<f64> {
    cfg.validate_physical()?;
    require_positive("omega", mode.omega)?;
    if mode.q == 0.0 {
        return Err(domain("g2 form is undefined at q = 0"));
    }
    let volume = cfg.volume();
    let g2 = (2.0 * PI * k.hbar * mode.omega * k.mu0 / (volume * mode.q * mode.q)).sqrt();
    let g1 = (2.0 * PI * k.hbar / (volume * mode.omega * k.eps0)).sqrt();
    Ok(g2 / g1)
}

/// The two terms of `v x (n_q x I) = n_q (v . I) - I (v . n_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ForceTerms {
    pub term_parallel: Vector3<f64>,
    pub term_transverse: Vector3<f64>,
}

impl ForceTerms {
    pub fn sum(&self) -> Vector3<f64> {
        self.term_parallel + self.term_transverse
    }
}

pub fn force_decomposition(v_charge: &Vector3<f64>, mode: &Mode) -> ForceTerms {
    ForceTerms {
        term_parallel: mode.direction * v_charge.dot(&mode.polarization),
        term_transverse: -mode.polarization * v_charge.dot(&mode.direction),
    }
}

/// Time-averaged field momentum `sum n_q hbar omega / (Omega C) (n_q + 1/2)`.
///
/// The `a+ a+` and `a a` cross terms oscillate at `2 omega` and average to
/// zero over a period, so they are not part of the mean; see
/// [`instantaneous_momentum`].
pub fn momentum_spectrum(modes: &[Mode], cfg: &DynamideChainConfig, k: &PhysicalConstants) -> Result<Vector3<f64>> {
    cfg.validate_physical()?;
    let scale = k.hbar / (cfg.volume() * k.c);
    Ok(modes
        .iter()
        .fold(Vector3::zeros(), |acc, m| acc + m.direction * (scale * m.omega * (m.occupation + 0.5))))
}

/// Momentum including the oscillating terms, with `a = sqrt(n) exp(-i phase)`:
/// `hbar omega / (2 Omega C) {2n + 1 + 2n cos(2(omega t - q n.r + phase))}`.
pub fn instantaneous_momentum(
    modes: &[Mode],
    cfg: &DynamideChainConfig,
    k: &PhysicalConstants,
    t: f64,
    r: &Vector3<f64>,
) -> Result<Vector3<f64>> {
    cfg.validate_physical()?;
    let scale = k.hbar / (2.0 * cfg.volume() * k.c);
    Ok(modes.iter().fold(Vector3::zeros(), |acc, m| {
        let arg = m.omega * t - m.q * m.direction.dot(r) + m.phase;
        let n = m.occupation;
        acc + m.direction * (scale * m.omega * (2.0 * n + 1.0 + 2.0 * n * (2.0 * arg).cos()))
    }))
}

/// Cross section `pi ((dx)^2 + (dy)^2)` of a needle-shaped photon with
/// `(dx)^2 = (dy)^2 = (C / omega)^2 / 2`, i.e. `pi C^2 / omega^2`.
pub fn photon_cross_section(omega: f64, k: &PhysicalConstants) -> Result<f64> {
    require_positive("omega", omega)?;
    let spread = 0.5 * (k.c / omega).powi(2);
    Ok(PI * (spread + spread))
}

/// Initial state of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialCondition {
    Zero,
    /// `u_j = amplitude cos(q_m j a)`, starting at rest.
    NormalMode { m: usize, amplitude: f64 },
    /// Explicit displacements, starting at rest.
    Displacement(Vec<f64>),
    /// Uniform displacements in `[-amplitude, amplitude]` drawn from `seed`.
    Random { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Snapshot {
    pub step: usize,
    pub displacement: Vec<f64>,
    pub velocity: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DispersionPoint {
    pub q: f64,
    pub omega_analytic: f64,
    /// `None` when the mode carries no measurable energy.
    pub omega_measured: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainRun {
    pub snapshots: Vec<Snapshot>,
    /// All `n` modes, sorted by `q` in `(-pi/a, pi/a]`.
    pub measured_dispersion: Vec<DispersionPoint>,
    pub initial_energy: f64,
    /// Largest relative excursion of the leapfrog's conserved energy.
    pub energy_drift: f64,
    /// Largest relative excursion of the plain kinetic + potential energy,
    /// which oscillates at `O((omega dt)^2)` under leapfrog.
    pub mechanical_energy_excursion: f64,
}

struct Chain<'a> {
    cfg: &'a DynamideChainConfig,
    on_site: f64,
}

impl Chain<'_> {
    fn accelerate(&self, u: &[f64], acc: &mut [f64]) {
        let n = u.len();
        let inv_theta = 1.0 / self.cfg.theta;
        for j in 0..n {
            let left = u[(j + n - 1) % n];
            let right = u[(j + 1) % n];
            let force = -self.on_site * u[j] - self.cfg.chi * (2.0 * u[j] - left - right);
            acc[j] = force * inv_theta;
        }
    }

    /// Kinetic energy, potential energy `-theta u.a / 2`, and the leapfrog
    /// correction `-(dt^2 theta / 8) |a|^2`.
    fn energies(&self, u: &[f64], v: &[f64], acc: &[f64]) -> (f64, f64) {
        let theta = self.cfg.theta;
        let dt = self.cfg.dt;
        let kinetic: f64 = 0.5 * theta * v.iter().map(|x| x * x).sum::<f64>();
        let potential: f64 = -0.5 * theta * u.iter().zip(acc).map(|(x, a)| x * a).sum::<f64>();
        let correction: f64 = -(dt * dt * theta / 8.0) * acc.iter().map(|a| a * a).sum::<f64>();
        (kinetic + potential + correction, kinetic + potential)
    }
}

fn initial_displacement(cfg: &DynamideChainConfig, initial: &InitialCondition) -> Result<Vec<f64>> {
    let n = cfg.n;
    Ok(match initial {
        InitialCondition::Zero => vec![0.0; n],
        InitialCondition::NormalMode { m, amplitude } => {
            require_finite("amplitude", *amplitude)?;
            let q = cfg.wavevector(*m);
            (0..n).map(|j| amplitude * (q * j as f64 * cfg.a).cos()).collect()
        }
        InitialCondition::Displacement(u) => {
            if u.len() != n {
                return Err(domain(format!("displacement profile has {} entries, chain has {n}", u.len())));
            }
            if !u.iter().all(|x| x.is_finite()) {
                return Err(domain("displacement profile must be finite"));
            }
            u.clone()
        }
        InitialCondition::Random { amplitude } => {
            require_finite("amplitude", *amplitude)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..n).map(|_| amplitude * rng.random_range(-1.0..=1.0)).collect()
        }
    })
}

/// Integrates the periodic chain with velocity-Verlet leapfrog and measures
/// the frequency of every normal mode from the peak of its temporal spectrum.
pub fn simulate_chain(cfg: &DynamideChainConfig, initial: &InitialCondition) -> Result<ChainRun> {
    cfg.validate()?;
    let n = cfg.n;
    let chain = Chain { cfg, on_site: 2.0 * cfg.chi_tilde };
    let mut u = initial_displacement(cfg, initial)?;
    let mut v = vec![0.0; n];
    let mut acc = vec![0.0; n];
    chain.accelerate(&u, &mut acc);

    let mut planner = FftPlanner::<f64>::new();
    let site_fft = planner.plan_fft_forward(n);
    let n_samples = cfg.steps / cfg.sample_stride + 1;
    // mode_series[m][s]
    let mut mode_series = vec![Vec::with_capacity(n_samples); n];
    let mut scratch = vec![Complex64::default(); n];
    let mut sample = |u: &[f64], series: &mut Vec<Vec<Complex64>>| {
        for (dst, &x) in scratch.iter_mut().zip(u) {
            *dst = Complex64::new(x, 0.0);
        }
        site_fft.process(&mut scratch);
        for (s, z) in series.iter_mut().zip(&scratch) {
            s.push(*z);
        }
    };

    let (e0, m0) = chain.energies(&u, &v, &acc);
    let mut max_dev: f64 = 0.0;
    let mut max_mech: f64 = 0.0;
    let mut snapshots = vec![Snapshot { step: 0, displacement: u.clone(), velocity: v.clone() }];
    sample(&u, &mut mode_series);

    let dt = cfg.dt;
    for step in 1..=cfg.steps {
        for j in 0..n {
            v[j] += 0.5 * dt * acc[j];
            u[j] += dt * v[j];
        }
        chain.accelerate(&u, &mut acc);
        for j in 0..n {
            v[j] += 0.5 * dt * acc[j];
        }
        if step % cfg.sample_stride == 0 {
            sample(&u, &mut mode_series);
            let (e, m) = chain.energies(&u, &v, &acc);
            max_dev = max_dev.max((e - e0).abs());
            max_mech = max_mech.max((m - m0).abs());
        }
        if cfg.record_stride > 0 && step % cfg.record_stride == 0 {
            snapshots.push(Snapshot { step, displacement: u.clone(), velocity: v.clone() });
        }
    }

    let sample_dt = dt * cfg.sample_stride as f64;
    let mode_peak: Vec<f64> = mode_series.iter().map(|s| s.iter().map(|z| z.norm()).fold(0.0, f64::max)).collect();
    let loudest = mode_peak.iter().copied().fold(0.0, f64::max);
    let mut measured_dispersion: Vec<DispersionPoint> = mode_series
        .iter()
        .zip(&mode_peak)
        .enumerate()
        .map(|(m, (series, &peak))| {
            let q = cfg.wavevector(m);
            // modes left at rounding level by the initial state are not measured
            let omega_measured = if peak > SILENT_MODE_RATIO * loudest { peak_frequency(series, sample_dt) } else { None };
            DispersionPoint { q, omega_analytic: cfg.analytic_frequency(q), omega_measured }
        })
        .collect();
    measured_dispersion.sort_by(|a, b| a.q.total_cmp(&b.q));

    let rel = |d: f64| if e0 > 0.0 { d / e0 } else { d };
    Ok(ChainRun {
        snapshots,
        measured_dispersion,
        initial_energy: e0,
        energy_drift: rel(max_dev),
        mechanical_energy_excursion: rel(max_mech),
    })
}

/// Angular frequency of the strongest spectral line of a complex series,
/// folding `+omega` and `-omega` together. Uses a Hann window and a
/// log-parabolic fit through the peak bin and its neighbours.
pub fn peak_frequency(series: &[Complex64], sample_dt: f64) -> Option<f64> {
    let len = series.len();
    if len < 8 {
        return None;
    }
    let peak_input = series.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(peak_input > 0.0) {
        return None;
    }
    let mut buf: Vec<Complex64> = series
        .iter()
        .enumerate()
        .map(|(i, z)| z * (0.5 - 0.5 * (2.0 * PI * i as f64 / (len - 1) as f64).cos()))
        .collect();
    FftPlanner::<f64>::new().plan_fft_forward(len).process(&mut buf);
    let half = len / 2;
    let power: Vec<f64> = (0..=half)
        .map(|k| {
            let pos = buf[k].norm_sqr();
            if k == 0 || 2 * k == len { pos } else { pos + buf[len - k].norm_sqr() }
        })
        .collect();
    let (kmax, &pmax) = power.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    let total: f64 = power.iter().sum();
    if !(pmax > 1e-24 * total) || total == 0.0 {
        return None;
    }
    let mut offset = 0.0;
    if kmax > 0 && kmax < half {
        let (l, c, r) = (power[kmax - 1].ln(), pmax.ln(), power[kmax + 1].ln());
        let denom = l - 2.0 * c + r;
        if denom.is_finite() && denom < 0.0 {
            offset = (0.5 * (l - r) / denom).clamp(-0.5, 0.5);
        }
    }
    Some(2.0 * PI * (kmax as f64 + offset) / (len as f64 * sample_dt))
}

/// CSV: `step,site,displacement,velocity`.
pub fn write_trajectory_csv<W: Write>(run: &ChainRun, mut w: W) -> io::Result<()> {
    writeln!(w, "step,site,displacement,velocity")?;
    for snap in &run.snapshots {
        for (site, (u, v)) in snap.displacement.iter().zip(&snap.velocity).enumerate() {
            writeln!(w, "{},{},{},{}", snap.step, site, format_f64(*u), format_f64(*v))?;
        }
    }
    Ok(())
}

/// CSV: `q,omega_analytic,omega_measured`; unmeasured modes are written as `nan`.
pub fn write_dispersion_csv<W: Write>(points: &[DispersionPoint], mut w: W) -> io::Result<()> {
    writeln!(w, "q,omega_analytic,omega_measured")?;
    for p in points {
        let meas = p.omega_measured.unwrap_or(f64::NAN);
        writeln!(w, "{},{},{}", format_f64(p.q), format_f64(p.omega_analytic), format_f64(meas))?;
    }
    Ok(())
}
