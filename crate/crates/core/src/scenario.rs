//! Running configurations and writing their results to disk.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::config::{Preparation, RunConfig};
use crate::dynamics::{run_time_series, DynamicsError, TimeGrid, TimeSeries, TimeSeriesRecord};
use crate::model::{build_h1, CouplingSpec, Dispersion, ModelParams};
use crate::sector::RegisterShape;
use crate::spectral::{diagonalize, secular_roots, SpectralError};

pub const CSV_HEADER: &str = "t,fidelity,entropy_bits,p0,p1,d_re,d_im";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("unknown preset `{0}` (expected fig1..fig5)")]
    UnknownPreset(String),
}

/// Renders records as CSV with full precision.
pub fn records_to_csv(records: &[TimeSeriesRecord]) -> String {
    let mut out = String::with_capacity(128 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.t, r.fidelity, r.entropy_bits, r.p0, r.p1, r.d_re, r.d_im
        );
    }
    out
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ScenarioError> {
    let io_err = |source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io_err)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(io_err)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io_err(e)
    })
}

/// `<output>.meta`, next to the CSV.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut p = output.as_os_str().to_owned();
    p.push(".meta");
    PathBuf::from(p)
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub csv_path: PathBuf,
    pub meta_path: PathBuf,
    pub series: TimeSeries,
}

/// Runs one configuration and writes the CSV and its sidecar. A relative
/// `output.path` is resolved against `base_dir`.
pub fn run_scenario(
    cfg: &RunConfig,
    base_dir: Option<&Path>,
) -> Result<ScenarioOutput, ScenarioError> {
    let series = run_time_series(&cfg.model, &cfg.prep_state, cfg.grid)?;
    let csv_path = match base_dir {
        Some(dir) if cfg.output_path.is_relative() => dir.join(&cfg.output_path),
        _ => cfg.output_path.clone(),
    };
    write_atomic(&csv_path, &records_to_csv(&series.records))?;
    let meta_path = sidecar_path(&csv_path);
    let mut meta = cfg.to_config_text();
    let _ = writeln!(meta, "# late_fidelity = {:?}", series.late_fidelity);
    let _ = writeln!(meta, "# late_entropy_bits = {:?}", series.late_entropy);
    write_atomic(&meta_path, &meta)?;
    Ok(ScenarioOutput {
        csv_path,
        meta_path,
        series,
    })
}

fn values_to_lines(values: &[f64]) -> String {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}

#[derive(Debug, Clone)]
pub struct SpectrumOutput {
    pub eigenvalues: Vec<f64>,
    /// `None` when the couplings depend on the qubit.
    pub secular_roots: Option<Vec<f64>>,
}

/// Eigenvalues of the one-excitation Hamiltonian and, where applicable,
/// the secular-equation roots. Written to `dir` when given.
pub fn run_spectrum(
    model: &ModelParams,
    dir: Option<&Path>,
) -> Result<SpectrumOutput, ScenarioError> {
    let sd = diagonalize(&build_h1(model))?;
    let eigenvalues = sd.eigenvalues().to_vec();
    let roots = match secular_roots(model) {
        Ok(r) => Some(r),
        Err(SpectralError::QubitDependentCoupling) => None,
        Err(e) => return Err(e.into()),
    };
    if let Some(dir) = dir {
        write_atomic(&dir.join("eigenvalues.csv"), &values_to_lines(&eigenvalues))?;
        if let Some(r) = &roots {
            write_atomic(&dir.join("secular_roots.csv"), &values_to_lines(r))?;
        }
    }
    Ok(SpectrumOutput {
        eigenvalues,
        secular_roots: roots,
    })
}

pub const PRESET_NAMES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];
const PRESET_MODES: usize = 200;
const PRESET_T_MAX: f64 = 2000.0;
const PRESET_STEPS: usize = 8001;

fn preset_config(
    shape: RegisterShape,
    coupling: CouplingSpec,
    prep: Preparation,
    file: &str,
) -> RunConfig {
    let model = ModelParams::new(shape, 1.0, coupling, Dispersion::Linear).expect("preset model");
    let prep_state = prep
        .spin_vector(shape.n_qubits())
        .expect("preset preparation");
    RunConfig {
        model,
        prep,
        prep_state,
        grid: TimeGrid::new(PRESET_T_MAX, PRESET_STEPS).expect("preset grid"),
        output_path: PathBuf::from(file),
        coupling_file: None,
        dispersion_file: None,
    }
}

/// The configurations behind a named preset.
pub fn preset(name: &str) -> Result<Vec<RunConfig>, ScenarioError> {
    let two = RegisterShape::new(2, PRESET_MODES).expect("shape");
    let four = RegisterShape::new(4, PRESET_MODES).expect("shape");
    let cfgs = match name {
        "fig1" => [0.005, 0.01, 0.02]
            .iter()
            .map(|&g0| {
                preset_config(
                    two,
                    CouplingSpec::Uniform { g0 },
                    Preparation::Symmetric,
                    &format!("fig1_g{g0}.csv"),
                )
            })
            .collect(),
        "fig2" | "fig3" => (1..=3)
            .map(|m| {
                preset_config(
                    four,
                    CouplingSpec::Uniform { g0: 0.01 },
                    Preparation::MSuperposition { m },
                    &format!("{name}_m{m}.csv"),
                )
            })
            .collect(),
        "fig4" => [10.0, 5.0, 1.0]
            .iter()
            .map(|&xi| {
                preset_config(
                    two,
                    CouplingSpec::CosineProfile { g0: 0.01, xi },
                    Preparation::Momentum { n: 1 },
                    &format!("fig4_xi{xi}.csv"),
                )
            })
            .collect(),
        "fig5" => vec![
            preset_config(
                two,
                CouplingSpec::CosineProfile { g0: 0.01, xi: 1.0 },
                Preparation::Symmetric,
                "fig5_symmetric.csv",
            ),
            preset_config(
                two,
                CouplingSpec::CosineProfile { g0: 0.01, xi: 1.0 },
                Preparation::Momentum { n: 1 },
                "fig5_antisymmetric.csv",
            ),
        ],
        other => return Err(ScenarioError::UnknownPreset(other.to_owned())),
    };
    Ok(cfgs)
}

/// Runs every configuration of a preset into `out_dir`.
pub fn run_preset(name: &str, out_dir: &Path) -> Result<Vec<ScenarioOutput>, ScenarioError> {
    preset(name)?
        .iter()
        .map(|cfg| run_scenario(cfg, Some(out_dir)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn small_config(path: &str) -> RunConfig {
        let text = format!(
            "register.n_qubits = 2\nregister.n_modes = 20\ncoupling.type = uniform\n\
             coupling.g0 = 0.05\nprep.type = symmetric\ngrid.t_max = 50\ngrid.n_steps = 101\n\
             output.path = {path}\n"
        );
        parse_config(&text, None).unwrap()
    }

    #[test]
    fn csv_layout() {
        let r = TimeSeriesRecord {
            t: 0.5,
            fidelity: 1.0,
            entropy_bits: 0.0,
            p0: 0.0,
            p1: 1.0,
            d_re: -0.25,
            d_im: 1e-20,
        };
        let csv = records_to_csv(&[r]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let row: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(row, vec![0.5, 1.0, 0.0, 0.0, 1.0, -0.25, 1e-20]);
        assert!(csv.ends_with('\n'));
    }

    #[test]
    fn scenario_writes_csv_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config("out/run.csv");
        let out = run_scenario(&cfg, Some(dir.path())).unwrap();
        let csv = fs::read_to_string(&out.csv_path).unwrap();
        assert_eq!(csv.lines().count(), 102);
        let meta = fs::read_to_string(&out.meta_path).unwrap();
        assert!(meta.contains("# late_fidelity"));
        assert_eq!(parse_config(&meta, None).unwrap(), cfg);
        let leftovers: Vec<_> = fs::read_dir(dir.path().join("out")).unwrap().collect();
        assert_eq!(leftovers.len(), 2);
    }

    #[test]
    fn spectrum_files_are_sorted() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config("x.csv");
        let out = run_spectrum(&cfg.model, Some(dir.path())).unwrap();
        assert_eq!(out.eigenvalues.len(), 22);
        assert_eq!(out.secular_roots.as_ref().unwrap().len(), 21);
        for name in ["eigenvalues.csv", "secular_roots.csv"] {
            let vals: Vec<f64> = fs::read_to_string(dir.path().join(name))
                .unwrap()
                .lines()
                .map(|l| l.parse().unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn presets_are_well_formed() {
        for name in PRESET_NAMES {
            let cfgs = preset(name).unwrap();
            assert!(!cfgs.is_empty());
            for cfg in &cfgs {
                assert_eq!(cfg.model.shape().n_modes(), 200);
                assert_eq!(parse_config(&cfg.to_config_text(), None).unwrap(), *cfg);
            }
        }
        assert!(matches!(
            preset("fig6"),
            Err(ScenarioError::UnknownPreset(_))
        ));
    }
}
