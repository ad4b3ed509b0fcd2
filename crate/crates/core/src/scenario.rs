//! Scenario files, dispatch and result tables.
//!
//! A scenario is a flat TOML document: one `kind` key, optional `seed` and
//! `output` keys, and the parameters of that kind as numbers or strings.
//!
//! ```toml
//! kind = "muon"
//! tau0 = 2.2e-6
//! gamma = 100
//! depth = 10000
//! ```
//!
//! Unknown keys are rejected. [`run_scenario`] output depends only on the
//! scenario text, the constants profile and the crate version.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Number, Value};
use thiserror::Error;

use crate::constants::PhysicalConstants;
use crate::dynamide_lattice::{self as lattice, DynamideChainConfig, InitialCondition, Mode};
use crate::interferometer::{self, EtherKinematics, FizeauConfig, InterferometerConfig};
use crate::kinematics::{self, Boost, DecayLaw, Event};
use crate::numfmt::{format_f64, parse_f64};
use crate::optics::{self, Medium, ResonanceParams, Transition, TransitionDirection};
use crate::wave_covariance::{self as wave, PlaneWave};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown key `{key}` for scenario kind `{kind}`")]
    UnknownKey { key: String, kind: String },
    #[error("missing required parameter `{key}` for scenario kind `{kind}`")]
    MissingParameter { key: String, kind: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numerical error in `{kind}` scenario: {source}")]
    Numerical { kind: String, source: crate::Error },
}

impl ScenarioError {
    /// 1 usage/validation, 2 numerical/domain, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Io { .. } => 3,
            ScenarioError::Numerical { .. } => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Boost,
    Compose,
    Dilation,
    Muon,
    Covariance,
    Chain,
    Amplitudes,
    Dispersion,
    Drag,
    Transition,
    Michelson,
    Fizeau,
}

#[derive(Debug, Clone, Copy)]
enum ParamType {
    Number,
    Integer { min: u64, max: u64 },
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub struct ParamSpec {
    pub name: &'static str,
    pub required: bool,
    pub doc: &'static str,
    ty: ParamType,
}

const fn req(name: &'static str, doc: &'static str) -> ParamSpec {
    ParamSpec { name, required: true, doc, ty: ParamType::Number }
}

const fn opt(name: &'static str, doc: &'static str) -> ParamSpec {
    ParamSpec { name, required: false, doc, ty: ParamType::Number }
}

const fn int(name: &'static str, required: bool, min: u64, max: u64, doc: &'static str) -> ParamSpec {
    ParamSpec { name, required, doc, ty: ParamType::Integer { min, max } }
}

const fn choice(name: &'static str, options: &'static [&'static str], doc: &'static str) -> ParamSpec {
    ParamSpec { name, required: false, doc, ty: ParamType::Choice(options) }
}

const BOOST_PARAMS: &[ParamSpec] = &[
    req("v", "frame velocity along x (m/s), |v| < C"),
    req("t", "event time (s)"),
    req("x", "event x (m)"),
    opt("y", "event y (m), default 0"),
    opt("z", "event z (m), default 0"),
    choice("transform", &["lorentz", "voigt"], "coordinate map, default lorentz"),
];
const COMPOSE_PARAMS: &[ParamSpec] = &[
    req("ux", "velocity x component (m/s)"),
    opt("uy", "velocity y component (m/s), default 0"),
    opt("uz", "velocity z component (m/s), default 0"),
    req("v", "frame velocity along x (m/s), |v| < C"),
];
const DILATION_PARAMS: &[ParamSpec] = &[
    req("dt", "proper duration (s), > 0"),
    req("v", "frame velocity (m/s), |v| < C"),
    opt("l", "rest length (m), > 0, default 1"),
];
const MUON_PARAMS: &[ParamSpec] = &[
    req("tau0", "rest lifetime (s), > 0"),
    req("gamma", "Lorentz factor, >= 1"),
    req("depth", "atmosphere depth (m), >= 0"),
    choice("decay", &["mean_life", "half_life"], "survival law, default mean_life"),
];
const COVARIANCE_PARAMS: &[ParamSpec] = &[
    req("v", "frame velocity (m/s), |v| < C"),
    opt("wavelength", "wavelength of the luminal wave (m), default 1"),
    int("ppw", false, 8, 4096, "points per wavelength on the coarsest grid, default 64"),
    int("levels", false, 2, 4, "number of refinement levels, default 3"),
];
const CHAIN_PARAMS: &[ParamSpec] = &[
    int("n", true, 2, 4096, "number of sites"),
    req("theta", "oscillator mass (kg), > 0"),
    req("chi_tilde", "on-site spring (N/m), > 0"),
    req("chi", "neighbour spring (N/m), > 0"),
    opt("a", "lattice spacing (m), default 1"),
    opt("omega0", "cell volume (m^3), default 1"),
    int("steps", false, 1, 10_000_000, "leapfrog steps, default 100000"),
    opt("dt", "time step (s), default 0.1/omega_max"),
    int("sample_stride", false, 1, 1_000_000, "steps between spectral samples, default 10"),
    choice("init", &["random", "mode"], "initial state, default random"),
    int("mode", false, 0, 4096, "mode index for init = \"mode\", default 1"),
    opt("amplitude", "initial displacement amplitude (m), default 1e-3"),
];
const AMPLITUDES_PARAMS: &[ParamSpec] = &[
    req("omega", "mode angular frequency (rad/s), > 0"),
    int("n", true, 1, u32::MAX as u64, "number of dynamides"),
    req("omega0", "cell volume (m^3), > 0"),
    opt("q", "wavevector (rad/m), default omega/C"),
    opt("theta", "oscillator mass (kg), default from the Coulomb relation"),
    opt("occupation", "occupation number, >= 0, default 0"),
];
const DISPERSION_PARAMS: &[ParamSpec] = &[
    req("omega_c", "resonance frequency (rad/s), >= 0"),
    req("m_osc", "oscillator mass, > 0"),
    req("tau_damp", "damping time (s), >= 0"),
    req("density", "oscillator density, >= 0"),
    req("omega_min", "sweep start (rad/s)"),
    req("omega_max", "sweep end (rad/s), >= omega_min"),
    int("points", false, 1, 1_000_000, "sweep points, default 101"),
];
const DRAG_PARAMS: &[ParamSpec] = &[req("n", "refractive index, >= 1"), req("v", "medium velocity (m/s), |v| < C")];
const TRANSITION_PARAMS: &[ParamSpec] = &[
    req("omega12", "transition frequency (rad/s), > 0"),
    req("r12", "dipole matrix element (m), >= 0"),
    opt("photon_count", "ambient photons, >= 0, default 0"),
    choice("direction", &["emission", "absorption"], "default emission"),
];
const MICHELSON_PARAMS: &[ParamSpec] = &[
    req("l", "arm length (m), > 0"),
    req("wavelength", "wavelength (m), > 0"),
    req("v", "ether wind (m/s), 0 <= v < C"),
    opt("orientation", "angle of arm 1 to the wind (rad), default 0"),
    choice("kinematics", &["galilean_ether", "lorentz", "galilean_with_contraction"], "default galilean_ether"),
    int("sweep", false, 1, 100_000, "orientations over [0, 2 pi), default 1 (just `orientation`)"),
];
const FIZEAU_PARAMS: &[ParamSpec] = &[
    req("tube_length", "length of each tube (m), > 0"),
    req("v", "fluid velocity (m/s), |v| < C/n"),
    req("n", "refractive index, >= 1"),
    req("wavelength", "wavelength (m), > 0"),
];

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 12] = [
        ScenarioKind::Boost,
        ScenarioKind::Compose,
        ScenarioKind::Dilation,
        ScenarioKind::Muon,
        ScenarioKind::Covariance,
        ScenarioKind::Chain,
        ScenarioKind::Amplitudes,
        ScenarioKind::Dispersion,
        ScenarioKind::Drag,
        ScenarioKind::Transition,
        ScenarioKind::Michelson,
        ScenarioKind::Fizeau,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Boost => "boost",
            ScenarioKind::Compose => "compose",
            ScenarioKind::Dilation => "dilation",
            ScenarioKind::Muon => "muon",
            ScenarioKind::Covariance => "covariance",
            ScenarioKind::Chain => "chain",
            ScenarioKind::Amplitudes => "amplitudes",
            ScenarioKind::Dispersion => "dispersion",
            ScenarioKind::Drag => "drag",
            ScenarioKind::Transition => "transition",
            ScenarioKind::Michelson => "michelson",
            ScenarioKind::Fizeau => "fizeau",
        }
    }

    pub fn summary(&self) -> &'static str {
        match self {
            ScenarioKind::Boost => "transform one event by a boost (or the Voigt map)",
            ScenarioKind::Compose => "relativistic velocity composition",
            ScenarioKind::Dilation => "paired dilation/contraction intervals and lengths",
            ScenarioKind::Muon => "muon decay length and surviving fraction",
            ScenarioKind::Covariance => "wave-equation residuals under Lorentz, Voigt and Galilean maps",
            ScenarioKind::Chain => "leapfrog dynamide chain and measured dispersion",
            ScenarioKind::Amplitudes => "single-mode P/E/A/H prefactors and zero-point momentum",
            ScenarioKind::Dispersion => "permittivity sweep of the resonance model",
            ScenarioKind::Drag => "Fresnel drag, first order and exact",
            ScenarioKind::Transition => "dipole transition rate and emitted intensity",
            ScenarioKind::Michelson => "Michelson-Morley fringe shift on 90 degree rotation",
            ScenarioKind::Fizeau => "Fizeau moving-fluid fringe shift",
        }
    }

    pub fn parameters(&self) -> &'static [ParamSpec] {
        match self {
            ScenarioKind::Boost => BOOST_PARAMS,
            ScenarioKind::Compose => COMPOSE_PARAMS,
            ScenarioKind::Dilation => DILATION_PARAMS,
            ScenarioKind::Muon => MUON_PARAMS,
            ScenarioKind::Covariance => COVARIANCE_PARAMS,
            ScenarioKind::Chain => CHAIN_PARAMS,
            ScenarioKind::Amplitudes => AMPLITUDES_PARAMS,
            ScenarioKind::Dispersion => DISPERSION_PARAMS,
            ScenarioKind::Drag => DRAG_PARAMS,
            ScenarioKind::Transition => TRANSITION_PARAMS,
            ScenarioKind::Michelson => MICHELSON_PARAMS,
            ScenarioKind::Fizeau => FIZEAU_PARAMS,
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unrecognized scenario kind `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ParamValue {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub parameters: BTreeMap<String, ParamValue>,
    pub output_path: Option<PathBuf>,
    pub seed: u64,
    /// The scenario text exactly as read.
    pub source: String,
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

fn line_of_key(text: &str, key: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim_start();
            l.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
                || l.starts_with(&format!("\"{key}\""))
                || (l.starts_with('[') && l.trim_start_matches('[').trim_start().starts_with(key))
        })
        .map_or(1, |i| i + 1)
}

impl Scenario {
    /// Parses and validates scenario text against the given constants.
    pub fn parse(text: &str, k: &PhysicalConstants) -> Result<Self> {
        let meaningful = text.lines().any(|l| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });
        if !meaningful {
            return Err(ScenarioError::Parse { line: 1, message: "empty scenario".into() });
        }
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ScenarioError::Parse {
            line: e.span().map_or(1, |s| line_of_offset(text, s.start)),
            message: e.message().to_string(),
        })?;

        let mut values = BTreeMap::new();
        for (key, value) in &table {
            let v = match value {
                toml::Value::Integer(i) => ParamValue::Number(*i as f64),
                toml::Value::Float(f) => ParamValue::Number(*f),
                toml::Value::String(s) => ParamValue::Text(s.clone()),
                other => {
                    return Err(ScenarioError::Parse {
                        line: line_of_key(text, key),
                        message: format!("key `{key}` must be a number or string, found {}", other.type_str()),
                    })
                }
            };
            values.insert(key.clone(), v);
        }

        let kind = match values.remove("kind") {
            Some(ParamValue::Text(s)) => s.parse::<ScenarioKind>()?,
            Some(ParamValue::Number(_)) => return Err(invalid("`kind` must be a string")),
            None => return Err(invalid("missing required key `kind`")),
        };
        let seed = match values.remove("seed") {
            None => 0,
            Some(ParamValue::Number(s)) if s >= 0.0 && s.fract() == 0.0 && s <= u32::MAX as f64 => s as u64,
            Some(_) => return Err(invalid("`seed` must be a non-negative integer below 2^32")),
        };
        let output_path = match values.remove("output") {
            None => None,
            Some(ParamValue::Text(s)) if !s.is_empty() => Some(PathBuf::from(s)),
            Some(_) => return Err(invalid("`output` must be a non-empty string path")),
        };

        let specs = kind.parameters();
        for key in values.keys() {
            if !specs.iter().any(|s| s.name == key) {
                return Err(ScenarioError::UnknownKey { key: key.clone(), kind: kind.name().into() });
            }
        }
        for spec in specs {
            match values.get(spec.name) {
                None if spec.required => {
                    return Err(ScenarioError::MissingParameter { key: spec.name.into(), kind: kind.name().into() })
                }
                None => {}
                Some(v) => check_type(spec, v)?,
            }
        }
        let scenario = Scenario { kind, parameters: values, output_path, seed, source: text.to_string() };
        check_domain(&scenario, k)?;
        Ok(scenario)
    }
}

fn check_type(spec: &ParamSpec, v: &ParamValue) -> Result<()> {
    match (spec.ty, v) {
        (ParamType::Number, ParamValue::Number(x)) if x.is_finite() => Ok(()),
        (ParamType::Number, _) => Err(invalid(format!("`{}` must be a finite number", spec.name))),
        (ParamType::Integer { min, max }, ParamValue::Number(x))
            if x.fract() == 0.0 && *x >= min as f64 && *x <= max as f64 =>
        {
            Ok(())
        }
        (ParamType::Integer { min, max }, _) => {
            Err(invalid(format!("`{}` must be an integer in [{min}, {max}]", spec.name)))
        }
        (ParamType::Choice(opts), ParamValue::Text(s)) if opts.contains(&s.as_str()) => Ok(()),
        (ParamType::Choice(opts), _) => Err(invalid(format!("`{}` must be one of {}", spec.name, opts.join(", ")))),
    }
}

pub fn parse_scenario(path: &Path, k: &PhysicalConstants) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|source| ScenarioError::Io { path: path.to_path_buf(), source })?;
    Scenario::parse(&text, k)
}

/// Typed access to validated parameters.
struct Params<'a>(&'a BTreeMap<String, ParamValue>);

impl Params<'_> {
    fn num_opt(&self, name: &str) -> Option<f64> {
        match self.0.get(name) {
            Some(ParamValue::Number(x)) => Some(*x),
            _ => None,
        }
    }

    fn num(&self, name: &str) -> f64 {
        self.num_opt(name).unwrap_or(f64::NAN)
    }

    fn num_or(&self, name: &str, default: f64) -> f64 {
        self.num_opt(name).unwrap_or(default)
    }

    fn int_or(&self, name: &str, default: usize) -> usize {
        self.num_opt(name).map_or(default, |x| x as usize)
    }

    fn text_or<'b>(&'b self, name: &str, default: &'b str) -> &'b str {
        match self.0.get(name) {
            Some(ParamValue::Text(s)) => s,
            _ => default,
        }
    }
}

fn require(cond: bool, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

fn check_domain(s: &Scenario, k: &PhysicalConstants) -> Result<()> {
    let p = Params(&s.parameters);
    let c = k.c;
    let subluminal = |name: &str| require(p.num(name).abs() < c, &format!("{name} must satisfy |{name}| < C"));
    match s.kind {
        ScenarioKind::Boost => subluminal("v"),
        ScenarioKind::Compose => {
            subluminal("v")?;
            let u = Vector3::new(p.num("ux"), p.num_or("uy", 0.0), p.num_or("uz", 0.0));
            require(u.norm() <= c * (1.0 + 4.0 * f64::EPSILON), "u must satisfy |u| <= C")
        }
        ScenarioKind::Dilation => {
            subluminal("v")?;
            require(p.num("dt") > 0.0, "dt must be > 0")?;
            require(p.num_or("l", 1.0) > 0.0, "l must be > 0")
        }
        ScenarioKind::Muon => {
            require(p.num("tau0") > 0.0, "tau0 must be > 0")?;
            require(p.num("gamma") >= 1.0, "gamma must be >= 1")?;
            require(p.num("depth") >= 0.0, "depth must be >= 0")
        }
        ScenarioKind::Covariance => {
            subluminal("v")?;
            require(p.num_or("wavelength", 1.0) > 0.0, "wavelength must be > 0")?;
            let finest = p.int_or("ppw", 64) << (p.int_or("levels", 3) - 1);
            require(finest <= 4096, "ppw * 2^(levels - 1) must not exceed 4096")
        }
        ScenarioKind::Chain => {
            for name in ["theta", "chi_tilde", "chi"] {
                require(p.num(name) > 0.0, &format!("{name} must be > 0"))?;
            }
            require(p.num_or("a", 1.0) > 0.0, "a must be > 0")?;
            require(p.num_or("omega0", 1.0) > 0.0, "omega0 must be > 0")?;
            if let Some(dt) = p.num_opt("dt") {
                require(dt > 0.0, "dt must be > 0")?;
            }
            let n = p.int_or("n", 0) as u64;
            let steps = p.int_or("steps", 100_000) as u64;
            require(n * steps <= 2_000_000_000, "n * steps must not exceed 2e9")
        }
        ScenarioKind::Amplitudes => {
            require(p.num("omega") > 0.0, "omega must be > 0")?;
            require(p.num("omega0") > 0.0, "omega0 must be > 0")?;
            if let Some(q) = p.num_opt("q") {
                require(q > 0.0, "q must be > 0")?;
            }
            if let Some(t) = p.num_opt("theta") {
                require(t > 0.0, "theta must be > 0")?;
            }
            require(p.num_or("occupation", 0.0) >= 0.0, "occupation must be >= 0")
        }
        ScenarioKind::Dispersion => {
            require(p.num("m_osc") > 0.0, "m_osc must be > 0")?;
            for name in ["omega_c", "tau_damp", "density"] {
                require(p.num(name) >= 0.0, &format!("{name} must be >= 0"))?;
            }
            require(p.num("omega_max") >= p.num("omega_min"), "omega_max must be >= omega_min")
        }
        ScenarioKind::Drag => {
            subluminal("v")?;
            require(p.num("n") >= 1.0, "n must be >= 1")
        }
        ScenarioKind::Transition => {
            require(p.num("omega12") > 0.0, "omega12 must be > 0")?;
            require(p.num("r12") >= 0.0, "r12 must be >= 0")?;
            require(p.num_or("photon_count", 0.0) >= 0.0, "photon_count must be >= 0")
        }
        ScenarioKind::Michelson => {
            require(p.num("l") > 0.0, "l must be > 0")?;
            require(p.num("wavelength") > 0.0, "wavelength must be > 0")?;
            let v = p.num("v");
            require((0.0..c).contains(&v), "v must satisfy 0 <= v < C")
        }
        ScenarioKind::Fizeau => {
            require(p.num("tube_length") > 0.0, "tube_length must be > 0")?;
            require(p.num("wavelength") > 0.0, "wavelength must be > 0")?;
            let n = p.num("n");
            require(n >= 1.0, "n must be >= 1")?;
            require(p.num("v").abs() < c / n, "v must satisfy |v| < C/n")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

fn col(name: &str, unit: &str) -> Column {
    Column { name: name.into(), unit: unit.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub kind: String,
    /// The scenario text, byte for byte.
    pub scenario: String,
    pub version: String,
    pub constants_profile: String,
    pub constants: PhysicalConstants,
    pub seed: u64,
    /// Scalar results that do not fit the row layout.
    pub summary: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Metadata,
}

impl ResultTable {
    pub fn new(columns: Vec<Column>, metadata: Metadata) -> Self {
        Self { columns, rows: Vec::new(), metadata }
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the column count");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn value(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column_index(name)?).copied()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .quote_style(csv::QuoteStyle::Necessary)
            .from_writer(Vec::new());
        // writing into a Vec cannot fail
        w.write_record(self.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)))
            .expect("in-memory csv");
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_f64(*v))).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is utf-8")
    }

    pub fn to_json(&self) -> String {
        let m = &self.metadata;
        let k = &m.constants;
        let summary: Map<String, Value> = m.summary.iter().map(|(key, v)| (key.clone(), float_value(*v))).collect();
        let doc = json!({
            "metadata": {
                "kind": m.kind,
                "scenario": m.scenario,
                "version": m.version,
                "seed": m.seed,
                "constants_profile": m.constants_profile,
                "constants": {
                    "c": float_value(k.c),
                    "e": float_value(k.e),
                    "eps0": float_value(k.eps0),
                    "mu0": float_value(k.mu0),
                    "hbar": float_value(k.hbar),
                },
                "summary": summary,
            },
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(|v| float_value(*v)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("json value serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let meta = doc.get("metadata").ok_or("missing metadata")?;
        let text_field = |key: &str| -> std::result::Result<String, String> {
            meta.get(key).and_then(Value::as_str).map(str::to_string).ok_or(format!("metadata.{key} missing"))
        };
        let consts = meta.get("constants").ok_or("metadata.constants missing")?;
        let cf = |key: &str| consts.get(key).and_then(value_float).ok_or(format!("constants.{key} missing"));
        let constants = PhysicalConstants { c: cf("c")?, e: cf("e")?, eps0: cf("eps0")?, mu0: cf("mu0")?, hbar: cf("hbar")? };
        let summary = meta
            .get("summary")
            .and_then(Value::as_object)
            .map(|o| o.iter().filter_map(|(key, v)| Some((key.clone(), value_float(v)?))).collect())
            .unwrap_or_default();
        let metadata = Metadata {
            kind: text_field("kind")?,
            scenario: text_field("scenario")?,
            version: text_field("version")?,
            constants_profile: text_field("constants_profile")?,
            constants,
            seed: meta.get("seed").and_then(Value::as_u64).ok_or("metadata.seed missing")?,
            summary,
        };
        let columns: Vec<Column> =
            serde_json::from_value(doc.get("columns").cloned().ok_or("missing columns")?).map_err(|e| e.to_string())?;
        let rows = doc
            .get("rows")
            .and_then(Value::as_array)
            .ok_or("missing rows")?
            .iter()
            .map(|r| {
                let cells = r.as_array().ok_or("row is not an array")?;
                let row: Option<Vec<f64>> = cells.iter().map(value_float).collect();
                let row = row.ok_or("non-numeric cell")?;
                if row.len() != columns.len() {
                    return Err("row width does not match columns");
                }
                Ok(row)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { columns, rows, metadata })
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

fn float_value(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&format_f64(v)).expect("formatted float is a JSON number"))
    } else {
        Value::String(format_f64(v))
    }
}

fn value_float(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_str().parse().ok(),
        Value::String(s) => parse_f64(s),
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(ScenarioError::Usage(format!("unknown format `{s}` (expected csv or json)"))),
        }
    }
}

/// Named constants profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstantsProfile {
    #[default]
    Si,
    Natural,
}

impl ConstantsProfile {
    pub fn constants(&self) -> PhysicalConstants {
        match self {
            ConstantsProfile::Si => PhysicalConstants::si(),
            ConstantsProfile::Natural => PhysicalConstants::natural(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ConstantsProfile::Si => "si",
            ConstantsProfile::Natural => "natural",
        }
    }
}

impl FromStr for ConstantsProfile {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "si" => Ok(ConstantsProfile::Si),
            "natural" => Ok(ConstantsProfile::Natural),
            _ => Err(ScenarioError::Usage(format!("unknown constants profile `{s}` (expected si or natural)"))),
        }
    }
}

/// Runs a validated scenario.
pub fn run_scenario(s: &Scenario, profile: ConstantsProfile) -> Result<ResultTable> {
    let k = profile.constants();
    let metadata = Metadata {
        kind: s.kind.name().into(),
        scenario: s.source.clone(),
        version: ARTIFACT_VERSION.into(),
        constants_profile: profile.name().into(),
        constants: k,
        seed: s.seed,
        summary: BTreeMap::new(),
    };
    dispatch(s, &k, metadata).map_err(|source| ScenarioError::Numerical { kind: s.kind.name().into(), source })
}

fn dispatch(s: &Scenario, k: &PhysicalConstants, metadata: Metadata) -> crate::Result<ResultTable> {
    let p = Params(&s.parameters);
    let c = k.c;
    let mut table;
    match s.kind {
        ScenarioKind::Boost => {
            table = ResultTable::new(
                vec![
                    col("t_prime", "s"),
                    col("x_prime", "m"),
                    col("y_prime", "m"),
                    col("z_prime", "m"),
                    col("gamma", "1"),
                    col("rapidity", "1"),
                    col("interval", "m^2"),
                    col("interval_prime", "m^2"),
                ],
                metadata,
            );
            let ev = Event::new(p.num("t"), p.num("x"), p.num_or("y", 0.0), p.num_or("z", 0.0));
            let b = Boost::new(p.num("v"), k)?;
            let out = match p.text_or("transform", "lorentz") {
                "voigt" => kinematics::voigt_transform(&ev, b.velocity(), k)?,
                _ => kinematics::lorentz_boost(&ev, &b),
            };
            table.push_row(vec![out.t, out.x, out.y, out.z, b.gamma(), b.rapidity(), ev.interval(c), out.interval(c)]);
        }
        ScenarioKind::Compose => {
            table = ResultTable::new(
                vec![col("ux_prime", "m/s"), col("uy_prime", "m/s"), col("uz_prime", "m/s"), col("speed_prime", "m/s")],
                metadata,
            );
            let u = Vector3::new(p.num("ux"), p.num_or("uy", 0.0), p.num_or("uz", 0.0));
            let w = kinematics::compose_velocities(u, p.num("v"), k)?;
            table.push_row(vec![w.x, w.y, w.z, w.norm()]);
        }
        ScenarioKind::Dilation => {
            table = ResultTable::new(
                vec![
                    col("dilated", "s"),
                    col("contracted", "s"),
                    col("proper", "s"),
                    col("interval_product", "s^2"),
                    col("tilde_l", "m"),
                    col("bar_l", "m"),
                    col("rest_l", "m"),
                    col("length_product", "m^2"),
                    col("simultaneity_speed", "m/s"),
                ],
                metadata,
            );
            let v = p.num("v");
            let t = kinematics::time_dilation_pair(p.num("dt"), v, k)?;
            let l = kinematics::length_contraction_pair(p.num_or("l", 1.0), v, k)?;
            let phase = kinematics::simultaneity_phase_velocity(v, k)?;
            table.push_row(vec![
                t.dilated,
                t.contracted,
                t.proper,
                t.product(),
                l.tilde_l,
                l.bar_l,
                l.rest,
                l.product(),
                phase.as_f64(),
            ]);
        }
        ScenarioKind::Muon => {
            table = ResultTable::new(
                vec![col("rest_length", "m"), col("boosted_length", "m"), col("surviving_fraction", "1")],
                metadata,
            );
            let law = match p.text_or("decay", "mean_life") {
                "half_life" => DecayLaw::HalfLife,
                _ => DecayLaw::MeanLife,
            };
            let m = kinematics::muon_penetration(p.num("tau0"), p.num("gamma"), p.num("depth"), law, k)?;
            table.push_row(vec![m.rest_length, m.boosted_length, m.surviving_fraction]);
        }
        ScenarioKind::Covariance => {
            table = ResultTable::new(
                vec![
                    col("points_per_wavelength", "1"),
                    col("dx", "m"),
                    col("untransformed", "1/m^2"),
                    col("lorentz", "1/m^2"),
                    col("voigt", "1/m^2"),
                    col("galilean", "1/m^2"),
                ],
                metadata,
            );
            let w = PlaneWave::luminal_with_wavelength(p.num_or("wavelength", 1.0), k)?;
            let (ppw, levels) = (p.int_or("ppw", 64), p.int_or("levels", 3));
            let grid: Vec<usize> = (0..levels).map(|i| ppw << i).collect();
            let study = wave::refinement_study(&w, p.num("v"), &grid, k)?;
            for l in &study {
                let r = &l.report;
                table.push_row(vec![l.points_per_wavelength as f64, l.dx, r.untransformed, r.lorentz, r.voigt, r.galilean]);
            }
            let dx: Vec<f64> = study.iter().map(|l| l.dx).collect();
            let series = |f: fn(&wave::CovarianceReport) -> f64| study.iter().map(|l| f(&l.report)).collect::<Vec<_>>();
            let summary = &mut table.metadata.summary;
            summary.insert("order_lorentz".into(), wave::convergence_order(&dx, &series(|r| r.lorentz)));
            summary.insert("order_voigt".into(), wave::convergence_order(&dx, &series(|r| r.voigt)));
            summary.insert("order_untransformed".into(), wave::convergence_order(&dx, &series(|r| r.untransformed)));
            let (a, b) = (&study[study.len() - 2], &study[study.len() - 1]);
            summary.insert(
                "galilean_limit".into(),
                wave::richardson_limit(a.dx, a.report.galilean, b.dx, b.report.galilean, 2.0),
            );
            summary.insert("galilean_over_lorentz".into(), b.report.galilean / b.report.lorentz);
        }
        ScenarioKind::Chain => {
            table = ResultTable::new(
                vec![col("q", "rad/m"), col("omega_analytic", "rad/s"), col("omega_measured", "rad/s"), col("relative_error", "1")],
                metadata,
            );
            let mut cfg = DynamideChainConfig::new(
                p.int_or("n", 0),
                p.num("theta"),
                p.num("chi_tilde"),
                p.num("chi"),
                p.num_or("a", 1.0),
                p.num_or("omega0", 1.0),
            );
            cfg.steps = p.int_or("steps", cfg.steps);
            cfg.dt = p.num_or("dt", cfg.dt);
            cfg.sample_stride = p.int_or("sample_stride", cfg.sample_stride);
            cfg.seed = s.seed;
            cfg.record_stride = 0;
            let amplitude = p.num_or("amplitude", 1e-3);
            let init = match p.text_or("init", "random") {
                "mode" => InitialCondition::NormalMode { m: p.int_or("mode", 1), amplitude },
                _ => InitialCondition::Random { amplitude },
            };
            let run = lattice::simulate_chain(&cfg, &init)?;
            for pt in &run.measured_dispersion {
                let meas = pt.omega_measured.unwrap_or(f64::NAN);
                table.push_row(vec![pt.q, pt.omega_analytic, meas, meas / pt.omega_analytic - 1.0]);
            }
            let summary = &mut table.metadata.summary;
            summary.insert("energy_drift".into(), run.energy_drift);
            summary.insert("mechanical_energy_excursion".into(), run.mechanical_energy_excursion);
            summary.insert("initial_energy".into(), run.initial_energy);
            summary.insert("intra_frequency".into(), cfg.intra_frequency());
            summary.insert("collective_frequency".into(), lattice::collective_frequency(cfg.chi, cfg.theta)?);
        }
        ScenarioKind::Amplitudes => {
            table = ResultTable::new(
                vec![
                    col("p0", "C/m^2"),
                    col("e0", "V/m"),
                    col("a0", "V*s/m"),
                    col("h0", "A/m"),
                    col("theta", "kg"),
                    col("e0_over_a0", "rad/s"),
                    col("e0_over_h0", "ohm"),
                    col("p0_over_eps0_e0", "1"),
                    col("g2_ratio", "1"),
                    col("momentum", "kg/(m^2*s)"),
                    col("cross_section", "m^2"),
                ],
                metadata,
            );
            let omega = p.num("omega");
            let omega0 = p.num("omega0");
            let theta = match p.num_opt("theta") {
                Some(t) => t,
                None => lattice::theta_from_cell(omega0, omega, k)?,
            };
            let mut cfg = DynamideChainConfig::new(p.int_or("n", 1), theta, 1.0, 1.0, 1.0, omega0);
            cfg.theta = theta;
            let mode = Mode::new(p.num_or("q", omega / c), omega, p.num_or("occupation", 0.0), Vector3::x(), Vector3::y())?;
            let amp = lattice::mode_amplitudes(&mode, &cfg, k)?;
            let momentum = lattice::momentum_spectrum(&[mode], &cfg, k)?;
            table.push_row(vec![
                amp.p0,
                amp.e0,
                amp.a0,
                amp.h0,
                theta,
                amp.e0 / amp.a0,
                amp.e0 / amp.h0,
                amp.p0 / k.eps0 / amp.e0,
                lattice::g2_consistency(&mode, &cfg, k)?,
                momentum.norm(),
                lattice::photon_cross_section(omega, k)?,
            ]);
        }
        ScenarioKind::Dispersion => {
            table = ResultTable::new(
                vec![col("omega", "rad/s"), col("epsilon", "1"), col("n", "1"), col("phase_velocity", "m/s")],
                metadata,
            );
            let params = ResonanceParams {
                oscillator_density: p.num("density"),
                omega_c: p.num("omega_c"),
                m_osc: p.num("m_osc"),
                tau_damp: p.num("tau_damp"),
            };
            let (lo, hi, n) = (p.num("omega_min"), p.num("omega_max"), p.int_or("points", 101));
            let omegas: Vec<f64> = (0..n)
                .map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect();
            for pt in optics::dispersion_sweep(&omegas, &params, k)? {
                table.push_row(vec![pt.omega, pt.epsilon, pt.n, pt.phase_velocity]);
            }
        }
        ScenarioKind::Drag => {
            table = ResultTable::new(
                vec![col("drag_coefficient", "1"), col("approx", "m/s"), col("exact", "m/s"), col("residual", "m/s")],
                metadata,
            );
            let d = optics::fresnel_drag(&Medium::from_index(p.num("n"))?, p.num("v"), k)?;
            table.push_row(vec![d.drag_coefficient, d.approx, d.exact, d.residual]);
        }
        ScenarioKind::Transition => {
            table = ResultTable::new(vec![col("p12", "1/s"), col("intensity", "W"), col("lifetime", "s")], metadata);
            let t = Transition::new(p.num("omega12"), p.num("r12"), p.num_or("photon_count", 0.0))?;
            let dir = match p.text_or("direction", "emission") {
                "absorption" => TransitionDirection::Absorption,
                _ => TransitionDirection::Emission,
            };
            let r = optics::transition_rate(&t, dir, k)?;
            let lifetime = if r.p12 > 0.0 { 1.0 / r.p12 } else { f64::INFINITY };
            table.push_row(vec![r.p12, r.intensity, lifetime]);
        }
        ScenarioKind::Michelson => {
            table = ResultTable::new(vec![col("angle_rad", "rad"), col("delta_t_s", "s"), col("fringe_shift", "1")], metadata);
            let kinematics = match p.text_or("kinematics", "galilean_ether") {
                "lorentz" => EtherKinematics::Lorentz,
                "galilean_with_contraction" => EtherKinematics::GalileanWithContraction,
                _ => EtherKinematics::GalileanEther,
            };
            let cfg = InterferometerConfig {
                arm_length: p.num("l"),
                wavelength: p.num("wavelength"),
                ether_speed: p.num("v"),
                orientation: p.num_or("orientation", 0.0),
                kinematics,
            };
            let sweep = p.int_or("sweep", 1);
            if sweep == 1 {
                let dt = interferometer::arm_time_difference(&cfg, k)?;
                table.push_row(vec![cfg.orientation, dt, interferometer::rotation_fringe_shift(&cfg, k)?]);
            } else {
                for r in interferometer::orientation_sweep(&cfg, sweep, k)? {
                    table.push_row(vec![r.angle, r.delta_t, r.fringe_shift]);
                }
            }
            let rest = interferometer::rest_frame_schedule(cfg.arm_length, k)?;
            table.metadata.summary.insert("rest_t2a".into(), rest.t2a);
            table.metadata.summary.insert("rest_t2b".into(), rest.t2b);
        }
        ScenarioKind::Fizeau => {
            table = ResultTable::new(vec![col("delta_t", "s"), col("fringe_shift", "1"), col("first_order", "1")], metadata);
            let cfg = FizeauConfig {
                tube_length: p.num("tube_length"),
                fluid_velocity: p.num("v"),
                medium: Medium::from_index(p.num("n"))?,
                wavelength: p.num("wavelength"),
            };
            let r = interferometer::fizeau_fringe_shift(&cfg, k)?;
            table.push_row(vec![r.delta_t, r.fringe_shift, r.first_order]);
        }
    }
    Ok(table)
}

/// Writes a rendered table to `path`, creating parent directories.
pub fn emit(table: &ResultTable, format: OutputFormat, path: &Path) -> Result<()> {
    let io_err = |source| ScenarioError::Io { path: path.to_path_buf(), source };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    fs::write(path, table.render(format)).map_err(io_err)
}

/// Scenario files reproducing the worked numbers, embedded at build time.
pub const REFERENCE_SUITE: &[(&str, &str)] = &[
    ("muon", include_str!("../scenarios/reference/muon.toml")),
    ("muon_half_life", include_str!("../scenarios/reference/muon_half_life.toml")),
    ("gamma_100", include_str!("../scenarios/reference/gamma_100.toml")),
    ("light_speed_limit", include_str!("../scenarios/reference/light_speed_limit.toml")),
    ("dilation_identities", include_str!("../scenarios/reference/dilation_identities.toml")),
    ("simultaneity_rest", include_str!("../scenarios/reference/simultaneity_rest.toml")),
    ("voigt_vs_lorentz", include_str!("../scenarios/reference/voigt_vs_lorentz.toml")),
    ("wave_covariance", include_str!("../scenarios/reference/wave_covariance.toml")),
    ("chain_dispersion", include_str!("../scenarios/reference/chain_dispersion.toml")),
    ("zero_point", include_str!("../scenarios/reference/zero_point.toml")),
    ("resonance_sweep", include_str!("../scenarios/reference/resonance_sweep.toml")),
    ("fresnel_drag", include_str!("../scenarios/reference/fresnel_drag.toml")),
    ("hydrogen_2p_1s", include_str!("../scenarios/reference/hydrogen_2p_1s.toml")),
    ("michelson_rest", include_str!("../scenarios/reference/michelson_rest.toml")),
    ("michelson_galilean", include_str!("../scenarios/reference/michelson_galilean.toml")),
    ("michelson_lorentz", include_str!("../scenarios/reference/michelson_lorentz.toml")),
    ("fizeau", include_str!("../scenarios/reference/fizeau.toml")),
];

/// Runs every bundled scenario, writing `<name>.<ext>` files into `dir`.
/// Returns the written paths in suite order.
pub fn run_reference_suite(dir: &Path, format: OutputFormat, profile: ConstantsProfile) -> Result<Vec<PathBuf>> {
    let k = profile.constants();
    REFERENCE_SUITE
        .iter()
        .map(|(name, text)| {
            let scenario = Scenario::parse(text, &k)?;
            let table = run_scenario(&scenario, profile)?;
            let path = dir.join(format!("{name}.{}", format.extension()));
            emit(&table, format, &path)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn si() -> PhysicalConstants {
        PhysicalConstants::si()
    }

    #[test]
    fn minimal_muon_parses() {
        let s = Scenario::parse("kind = \"muon\"\ntau0 = 2.2e-6\ngamma = 100\ndepth = 10000\n", &si()).unwrap();
        assert_eq!(s.kind, ScenarioKind::Muon);
        assert_eq!(s.parameters.get("gamma"), Some(&ParamValue::Number(100.0)));
        assert_eq!(s.seed, 0);
    }

    #[test]
    fn empty_and_malformed_files() {
        assert!(matches!(Scenario::parse("", &si()), Err(ScenarioError::Parse { line: 1, .. })));
        assert!(matches!(Scenario::parse("# just a comment\n\n", &si()), Err(ScenarioError::Parse { .. })));
        let err = Scenario::parse("kind = \"muon\"\ntau0 = 2.2e-6\ngamma = = 100\n", &si()).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 3, .. }), "{err}");
        let err = Scenario::parse("kind = \"muon\"\n\n[table]\nx = 1\n", &si()).unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn validation_errors_name_the_problem() {
        let err = Scenario::parse("kind = \"boost\"\nv = 4e8\nt = 0\nx = 0\n", &si()).unwrap_err();
        assert!(err.to_string().contains("v must satisfy |v| < C"), "{err}");
        assert_eq!(err.exit_code(), 1);
        let err = Scenario::parse("kind = \"drag\"\nn = 1.3\nv = 1\nspeed = 3\n", &si()).unwrap_err();
        assert!(matches!(&err, ScenarioError::UnknownKey { key, .. } if key == "speed"));
        let err = Scenario::parse("kind = \"drag\"\nn = 1.3\n", &si()).unwrap_err();
        assert!(matches!(&err, ScenarioError::MissingParameter { key, .. } if key == "v"));
        let err = Scenario::parse("kind = \"warp\"\n", &si()).unwrap_err();
        assert!(err.to_string().contains("warp"));
        let err = Scenario::parse("tau0 = 1\n", &si()).unwrap_err();
        assert!(err.to_string().contains("kind"));
        let err = Scenario::parse("kind = \"chain\"\nn = 2.5\ntheta = 1\nchi = 1\nchi_tilde = 1\n", &si()).unwrap_err();
        assert!(err.to_string().contains("integer"));
        let err = Scenario::parse("kind = \"michelson\"\nl = 1\nwavelength = 1e-6\nv = 1\nkinematics = \"aether\"\n", &si())
            .unwrap_err();
        assert!(err.to_string().contains("galilean_ether"));
    }

    #[test]
    fn scenario_table_examples() {
        let k = si();
        let s = Scenario::parse("kind = \"muon\"\ntau0 = 2.2e-6\ngamma = 100\ndepth = 10000\n", &k).unwrap();
        let t = run_scenario(&s, ConstantsProfile::Si).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.columns.len(), 3);
        assert!((t.value(0, "rest_length").unwrap() / 660.0 - 1.0).abs() < 5e-3);
        assert!((t.value(0, "boosted_length").unwrap() / 66_000.0 - 1.0).abs() < 5e-3);
        assert!((t.value(0, "surviving_fraction").unwrap() - 0.859).abs() < 1e-3);

        let s = Scenario::parse("kind = \"compose\"\nux = 0\nv = 0\n", &k).unwrap();
        let t = run_scenario(&s, ConstantsProfile::Si).unwrap();
        assert_eq!(t.value(0, "ux_prime"), Some(0.0));

        let s = Scenario::parse(
            "kind = \"michelson\"\nkinematics = \"galilean_ether\"\nl = 11\nwavelength = 5e-7\nv = 3e4\n",
            &k,
        )
        .unwrap();
        let t = run_scenario(&s, ConstantsProfile::Si).unwrap();
        assert!((t.value(0, "fringe_shift").unwrap() - 0.44).abs() < 0.01);
    }

    #[test]
    fn numerical_errors_carry_context() {
        // passes validation (theta > 0) but violates the leapfrog bound
        let s = Scenario::parse("kind = \"chain\"\nn = 4\ntheta = 1\nchi = 1\nchi_tilde = 1\ndt = 5\n", &si()).unwrap();
        let err = run_scenario(&s, ConstantsProfile::Si).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("chain"), "{err}");
    }

    #[test]
    fn csv_layout() {
        let s = Scenario::parse("kind = \"muon\"\ntau0 = 2.2e-6\ngamma = 100\ndepth = 10000\n", &si()).unwrap();
        let mut t = run_scenario(&s, ConstantsProfile::Si).unwrap();
        let csv = t.to_csv();
        let mut lines = csv.split('\n');
        assert_eq!(lines.next(), Some("rest_length[m],boosted_length[m],surviving_fraction[1]"));
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 3);
        assert_eq!(row[0], format_f64(t.rows[0][0]));
        assert!(!csv.contains('\r'));
        t.rows.clear();
        assert_eq!(t.to_csv(), "rest_length[m],boosted_length[m],surviving_fraction[1]\n");
        let mut quoted = t.clone();
        quoted.columns[0].name = "a,b".into();
        assert!(quoted.to_csv().starts_with("\"a,b[m]\","));
    }

    #[test]
    fn json_round_trip_is_bitwise() {
        let text = "kind = \"dilation\"\ndt = 1\nv = 0\nl = 0.3\n";
        let s = Scenario::parse(text, &si()).unwrap();
        let t = run_scenario(&s, ConstantsProfile::Si).unwrap();
        assert!(t.value(0, "simultaneity_speed").unwrap().is_infinite());
        let json = t.to_json();
        assert!(json.contains("\"inf\""));
        let back = ResultTable::from_json(&json).unwrap();
        assert_eq!(back.metadata.scenario, text);
        assert_eq!(back.columns, t.columns);
        let bits = |t: &ResultTable| t.rows.iter().flatten().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&back), bits(&t));
        assert_eq!(back.metadata.constants, t.metadata.constants);
    }

    #[test]
    fn every_bundled_scenario_validates() {
        for (name, text) in REFERENCE_SUITE {
            Scenario::parse(text, &si()).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
