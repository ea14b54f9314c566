use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qregister::acceptance;
use qregister::config::parse_config;
use qregister::scenario::{run_preset, run_scenario, run_spectrum, PRESET_NAMES};

/// Exact one-excitation dynamics of a qubit register in a bosonic bath.
#[derive(Parser)]
#[command(name = "qregister", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration file and write its CSV and `.meta` sidecar.
    Run { config: PathBuf },
    /// Run a named figure preset.
    Preset {
        #[arg(value_parser = PRESET_NAMES)]
        name: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write `eigenvalues.csv` and `secular_roots.csv` for a configuration.
    Spectrum {
        config: PathBuf,
        /// Output directory; defaults to the directory of the config file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Check,
}

fn load(path: &Path) -> Result<(qregister::RunConfig, PathBuf), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let cfg = parse_config(&text, Some(&base)).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((cfg, base))
}

fn print_late(series: &qregister::TimeSeries, path: &Path) {
    println!(
        "{}: late F = {:.6}, late S = {:.6} bits",
        path.display(),
        series.late_fidelity,
        series.late_entropy
    );
}

fn execute(command: Command) -> Result<bool, String> {
    match command {
        Command::Run { config } => {
            let (cfg, base) = load(&config)?;
            let out = run_scenario(&cfg, Some(&base)).map_err(|e| e.to_string())?;
            print_late(&out.series, &out.csv_path);
            Ok(true)
        }
        Command::Preset { name, out } => {
            for run in run_preset(&name, &out).map_err(|e| e.to_string())? {
                print_late(&run.series, &run.csv_path);
            }
            Ok(true)
        }
        Command::Spectrum { config, out } => {
            let (cfg, base) = load(&config)?;
            let dir = out.unwrap_or(base);
            let spectrum = run_spectrum(&cfg.model, Some(&dir)).map_err(|e| e.to_string())?;
            println!(
                "{} eigenvalues written to {}",
                spectrum.eigenvalues.len(),
                dir.display()
            );
            match spectrum.secular_roots {
                Some(r) => println!("{} secular roots written", r.len()),
                None => println!("couplings depend on the qubit; secular roots skipped"),
            }
            Ok(true)
        }
        Command::Check => {
            let reports = acceptance::run_all();
            for r in &reports {
                println!("{r}");
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            println!(
                "{} of {} criteria passed",
                reports.len() - failed,
                reports.len()
            );
            Ok(failed == 0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
