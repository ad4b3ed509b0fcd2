//! Numerical laboratory for special-relativity kinematics, a dipole-lattice
//! ("dynamide") vacuum model, dielectric dispersion and light drag, and the
//! classic muon, Michelson-Morley and Fizeau scenarios.
//!
//! Every computational module is a set of pure functions over small value
//! types. The [`scenario`] module ties them together behind a line-oriented
//! scenario file format and deterministic CSV/JSON output.

pub mod constants;
pub mod dynamide_lattice;
pub mod error;
pub mod interferometer;
pub mod kinematics;
pub mod numfmt;
pub mod optics;
pub mod scenario;
pub mod wave_covariance;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
