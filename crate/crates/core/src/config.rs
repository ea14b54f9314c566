//! Run configuration: a flat `key = value` document.
//!
//! ```text
//! # two qubits, weak uniform coupling
//! register.n_qubits = 2
//! register.n_modes = 200
//! coupling.type = uniform
//! coupling.g0 = 0.01
//! prep.type = symmetric
//! grid.t_max = 2000
//! grid.n_steps = 8001
//! output.path = sym.csv
//! ```
//!
//! Unknown keys, duplicates and keys that do not apply to the selected
//! variant are rejected with their line number.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::{DynamicsError, TimeGrid};
use crate::model::{CouplingSpec, Dispersion, ModelError, ModelParams};
use crate::sector::{m_superposition, momentum_state, symmetric_state, RegisterShape, SpinVector};

/// Tolerance on the normalization of user-supplied amplitudes.
pub const NORM_TOLERANCE: f64 = 1e-9;

const KNOWN_KEYS: &[&str] = &[
    "register.n_qubits",
    "register.n_modes",
    "model.epsilon",
    "coupling.type",
    "coupling.g0",
    "coupling.xi",
    "coupling.file",
    "dispersion.type",
    "dispersion.file",
    "prep.type",
    "prep.m",
    "prep.n",
    "prep.cs",
    "prep.ca",
    "prep.amplitudes",
    "grid.t_max",
    "grid.n_steps",
    "output.path",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { key: String, line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: unknown key for {context}: `{key}`")]
    NotApplicable {
        key: String,
        line: usize,
        context: String,
    },
    #[error("missing required key `{key}`")]
    Missing { key: String },
    #[error("line {line}: invalid value for `{key}`: {reason}")]
    Invalid {
        key: String,
        line: usize,
        reason: String,
    },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Initial register preparation.
#[derive(Debug, Clone, PartialEq)]
pub enum Preparation {
    Symmetric,
    Momentum {
        n: usize,
    },
    MSuperposition {
        m: usize,
    },
    /// `c_s |psi_sym> + c_a |psi_a>` for two qubits, with the Bell states
    /// `(|1> +- |2>) / sqrt 2`.
    BellMix {
        cs: Complex64,
        ca: Complex64,
    },
    Explicit {
        amplitudes: Vec<Complex64>,
    },
}

impl Preparation {
    pub fn spin_vector(&self, n_qubits: usize) -> Result<SpinVector, String> {
        match self {
            Self::Symmetric => Ok(symmetric_state(n_qubits)),
            Self::Momentum { n } => momentum_state(n_qubits, *n).map_err(|e| e.to_string()),
            Self::MSuperposition { m } => m_superposition(n_qubits, *m).map_err(|e| e.to_string()),
            Self::BellMix { cs, ca } => {
                if n_qubits != 2 {
                    return Err(format!("bell_mix needs 2 qubits, register has {n_qubits}"));
                }
                let weight = cs.norm_sqr() + ca.norm_sqr();
                if (weight - 1.0).abs() > NORM_TOLERANCE {
                    return Err(format!("|cs|^2 + |ca|^2 = {weight}, expected 1"));
                }
                let s = std::f64::consts::FRAC_1_SQRT_2;
                SpinVector::from_amplitudes(vec![(cs + ca) * s, (cs - ca) * s])
                    .map_err(|e| e.to_string())
            }
            Self::Explicit { amplitudes } => {
                if amplitudes.len() != n_qubits {
                    return Err(format!(
                        "{} amplitudes given for {n_qubits} qubits",
                        amplitudes.len()
                    ));
                }
                let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > NORM_TOLERANCE {
                    return Err(format!("amplitudes have norm {norm}, expected 1"));
                }
                SpinVector::from_amplitudes(amplitudes.clone()).map_err(|e| e.to_string())
            }
        }
    }

    fn type_name(&self) -> &'static str {
        match self {
            Self::Symmetric => "symmetric",
            Self::Momentum { .. } => "momentum",
            Self::MSuperposition { .. } => "m_superposition",
            Self::BellMix { .. } => "bell_mix",
            Self::Explicit { .. } => "explicit",
        }
    }
}

/// Fully validated run description.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ModelParams,
    pub prep: Preparation,
    pub prep_state: SpinVector,
    pub grid: TimeGrid,
    pub output_path: PathBuf,
    /// Resolved sources of file-backed parameters, kept for the sidecar.
    pub coupling_file: Option<PathBuf>,
    pub dispersion_file: Option<PathBuf>,
}

struct Entry {
    value: String,
    line: usize,
}

struct Document {
    entries: BTreeMap<String, Entry>,
}

impl Document {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !KNOWN_KEYS.contains(&key) {
                return Err(ConfigError::UnknownKey {
                    key: key.to_owned(),
                    line,
                });
            }
            if entries.contains_key(key) {
                return Err(ConfigError::Duplicate {
                    key: key.to_owned(),
                    line,
                });
            }
            entries.insert(
                key.to_owned(),
                Entry {
                    value: value.to_owned(),
                    line,
                },
            );
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<Entry> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<Entry, ConfigError> {
        self.take(key).ok_or_else(|| ConfigError::Missing {
            key: key.to_owned(),
        })
    }
}

fn invalid(key: &str, entry: &Entry, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_owned(),
        line: entry.line,
        reason: reason.into(),
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, entry: &Entry) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    entry
        .value
        .parse::<T>()
        .map_err(|e| invalid(key, entry, format!("`{}`: {e}", entry.value)))
}

fn require_value<T: std::str::FromStr>(
    doc: &mut Document,
    key: &str,
) -> Result<(T, Entry), ConfigError>
where
    T::Err: std::fmt::Display,
{
    let entry = doc.require(key)?;
    let v = parse_value(key, &entry)?;
    Ok((v, entry))
}

fn read_numbers(
    key: &str,
    entry: &Entry,
    base_dir: Option<&Path>,
) -> Result<(Vec<f64>, PathBuf), ConfigError> {
    let path = match base_dir {
        Some(dir) => dir.join(&entry.value),
        None => PathBuf::from(&entry.value),
    };
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io {
        path: path.clone(),
        source,
    })?;
    let numbers = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| invalid(key, entry, format!("{}: `{tok}`: {e}", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((numbers, path))
}

fn model_error(key: &str, entry: &Entry, e: ModelError) -> ConfigError {
    invalid(key, entry, e.to_string())
}

/// Parses and validates a run configuration. Relative file references are
/// resolved against `base_dir` when given.
pub fn parse_config(text: &str, base_dir: Option<&Path>) -> Result<RunConfig, ConfigError> {
    let mut doc = Document::parse(text)?;

    let (n_qubits, nq_entry) = require_value::<usize>(&mut doc, "register.n_qubits")?;
    let (n_modes, nm_entry) = require_value::<usize>(&mut doc, "register.n_modes")?;
    if n_qubits == 0 {
        return Err(invalid(
            "register.n_qubits",
            &nq_entry,
            "must be at least 1",
        ));
    }
    if n_modes == 0 {
        return Err(invalid("register.n_modes", &nm_entry, "must be at least 1"));
    }
    let shape = RegisterShape::new(n_qubits, n_modes).expect("checked above");

    let epsilon_entry = doc.take("model.epsilon");
    let epsilon = match &epsilon_entry {
        Some(e) => parse_value::<f64>("model.epsilon", e)?,
        None => 1.0,
    };

    let (coupling_type, coupling_entry) = require_value::<String>(&mut doc, "coupling.type")?;
    let mut coupling_file = None;
    let coupling = match coupling_type.as_str() {
        "uniform" => {
            let (g0, _) = require_value::<f64>(&mut doc, "coupling.g0")?;
            CouplingSpec::Uniform { g0 }
        }
        "cosine" => {
            let (g0, _) = require_value::<f64>(&mut doc, "coupling.g0")?;
            let (xi, _) = require_value::<f64>(&mut doc, "coupling.xi")?;
            CouplingSpec::CosineProfile { g0, xi }
        }
        "explicit" => {
            let entry = doc.require("coupling.file")?;
            let (numbers, path) = read_numbers("coupling.file", &entry, base_dir)?;
            if numbers.len() != n_qubits * n_modes {
                return Err(invalid(
                    "coupling.file",
                    &entry,
                    format!(
                        "{} values, expected N_b x N = {}",
                        numbers.len(),
                        n_qubits * n_modes
                    ),
                ));
            }
            coupling_file = Some(path);
            CouplingSpec::Explicit {
                g: numbers
                    .into_iter()
                    .map(|x| Complex64::new(x, 0.0))
                    .collect(),
            }
        }
        other => {
            return Err(invalid(
                "coupling.type",
                &coupling_entry,
                format!("`{other}` (expected uniform, cosine or explicit)"),
            ))
        }
    };

    let mut dispersion_file = None;
    let dispersion_entry = doc.take("dispersion.type");
    let dispersion_type = dispersion_entry
        .as_ref()
        .map_or_else(|| "linear".to_owned(), |e| e.value.clone());
    let dispersion = match dispersion_type.as_str() {
        "linear" => Dispersion::Linear,
        "explicit" => {
            let entry = doc.require("dispersion.file")?;
            let (omegas, path) = read_numbers("dispersion.file", &entry, base_dir)?;
            dispersion_file = Some(path);
            Dispersion::Explicit { omegas }
        }
        other => {
            return Err(invalid(
                "dispersion.type",
                dispersion_entry
                    .as_ref()
                    .expect("non-default type has an entry"),
                format!("`{other}` (expected linear or explicit)"),
            ))
        }
    };

    let model = ModelParams::new(shape, epsilon, coupling, dispersion).map_err(|e| {
        let (key, entry) = match (&e, &epsilon_entry) {
            (ModelError::Epsilon(_), Some(entry)) => ("model.epsilon", entry),
            (ModelError::DispersionLength { .. } | ModelError::Frequency { .. }, _) => (
                "dispersion.type",
                dispersion_entry.as_ref().unwrap_or(&coupling_entry),
            ),
            _ => ("coupling.type", &coupling_entry),
        };
        model_error(key, entry, e)
    })?;

    let (prep_type, prep_entry) = require_value::<String>(&mut doc, "prep.type")?;
    let prep = match prep_type.as_str() {
        "symmetric" => Preparation::Symmetric,
        "momentum" => {
            let (n, _) = require_value::<usize>(&mut doc, "prep.n")?;
            Preparation::Momentum { n }
        }
        "m_superposition" => {
            let (m, _) = require_value::<usize>(&mut doc, "prep.m")?;
            Preparation::MSuperposition { m }
        }
        "bell_mix" => {
            let (cs, _) = require_value::<Complex64>(&mut doc, "prep.cs")?;
            let (ca, _) = require_value::<Complex64>(&mut doc, "prep.ca")?;
            Preparation::BellMix { cs, ca }
        }
        "explicit" => {
            let entry = doc.require("prep.amplitudes")?;
            let amplitudes = entry
                .value
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<Complex64>().map_err(|e| {
                        invalid("prep.amplitudes", &entry, format!("`{}`: {e}", tok.trim()))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            Preparation::Explicit { amplitudes }
        }
        other => return Err(invalid(
            "prep.type",
            &prep_entry,
            format!(
                "`{other}` (expected symmetric, momentum, m_superposition, bell_mix or explicit)"
            ),
        )),
    };
    let prep_state = prep
        .spin_vector(n_qubits)
        .map_err(|reason| invalid("prep.type", &prep_entry, reason))?;

    let (t_max, t_entry) = require_value::<f64>(&mut doc, "grid.t_max")?;
    let (n_steps, n_entry) = require_value::<usize>(&mut doc, "grid.n_steps")?;
    let grid = TimeGrid::new(t_max, n_steps).map_err(|e| match e {
        DynamicsError::Grid { n_steps, .. } if n_steps < 2 => {
            invalid("grid.n_steps", &n_entry, e.to_string())
        }
        _ => invalid("grid.t_max", &t_entry, e.to_string()),
    })?;

    let output = doc.require("output.path")?;
    let output_path = PathBuf::from(&output.value);

    if let Some((key, entry)) = doc.entries.iter().min_by_key(|(_, e)| e.line) {
        let context = match key.split('.').next() {
            Some("coupling") => format!("{coupling_type} coupling"),
            Some("dispersion") => format!("{dispersion_type} dispersion"),
            Some("prep") => format!("{} preparation", prep.type_name()),
            _ => "this configuration".to_owned(),
        };
        return Err(ConfigError::NotApplicable {
            key: key.clone(),
            line: entry.line,
            context,
        });
    }

    Ok(RunConfig {
        model,
        prep,
        prep_state,
        grid,
        output_path,
        coupling_file,
        dispersion_file,
    })
}

fn fmt_complex(z: Complex64) -> String {
    format!("{:?}{:+?}j", z.re, z.im)
}

impl RunConfig {
    /// Renders the configuration back into the key-value grammar. Floats use
    /// the shortest round-trip representation, so parsing the output
    /// reproduces the same configuration.
    pub fn to_config_text(&self) -> String {
        let mut s = String::new();
        let shape = self.model.shape();
        let _ = writeln!(s, "register.n_qubits = {}", shape.n_qubits());
        let _ = writeln!(s, "register.n_modes = {}", shape.n_modes());
        let _ = writeln!(s, "model.epsilon = {:?}", self.model.epsilon());
        match self.model.coupling() {
            CouplingSpec::Uniform { g0 } => {
                let _ = writeln!(s, "coupling.type = uniform\ncoupling.g0 = {g0:?}");
            }
            CouplingSpec::CosineProfile { g0, xi } => {
                let _ = writeln!(
                    s,
                    "coupling.type = cosine\ncoupling.g0 = {g0:?}\ncoupling.xi = {xi:?}"
                );
            }
            CouplingSpec::Explicit { .. } => {
                let path = self
                    .coupling_file
                    .as_ref()
                    .map_or_else(String::new, |p| p.display().to_string());
                let _ = writeln!(s, "coupling.type = explicit\ncoupling.file = {path}");
            }
        }
        match self.model.dispersion() {
            Dispersion::Linear => {
                let _ = writeln!(s, "dispersion.type = linear");
            }
            Dispersion::Explicit { .. } => {
                let path = self
                    .dispersion_file
                    .as_ref()
                    .map_or_else(String::new, |p| p.display().to_string());
                let _ = writeln!(s, "dispersion.type = explicit\ndispersion.file = {path}");
            }
        }
        let _ = writeln!(s, "prep.type = {}", self.prep.type_name());
        match &self.prep {
            Preparation::Symmetric => {}
            Preparation::Momentum { n } => {
                let _ = writeln!(s, "prep.n = {n}");
            }
            Preparation::MSuperposition { m } => {
                let _ = writeln!(s, "prep.m = {m}");
            }
            Preparation::BellMix { cs, ca } => {
                let _ = writeln!(
                    s,
                    "prep.cs = {}\nprep.ca = {}",
                    fmt_complex(*cs),
                    fmt_complex(*ca)
                );
            }
            Preparation::Explicit { amplitudes } => {
                let list: Vec<String> = amplitudes.iter().map(|z| fmt_complex(*z)).collect();
                let _ = writeln!(s, "prep.amplitudes = {}", list.join(", "));
            }
        }
        let _ = writeln!(s, "grid.t_max = {:?}", self.grid.t_max());
        let _ = writeln!(s, "grid.n_steps = {}", self.grid.n_steps());
        let _ = writeln!(s, "output.path = {}", self.output_path.display());
        s
    }
}
