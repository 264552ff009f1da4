//! `qle`: batch runs of the quantum Langevin toolkit.
//!
//! Every command reads an optional TOML config, applies `--set section.key=value`
//! overrides, and writes CSV tables, JSON mirrors and a `manifest.json` into
//! the output directory. `qle rerun` replays a manifest.
//!
//! Exit status: 0 on success, 1 on numeric failure, 2 on invalid input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod manifest;

use config::{Command, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Schema or parameter violation.
    Validation(String),
    /// Typed error from the numerical core.
    Core(qle_core::Error),
    Io(String),
    /// A replayed run did not reproduce its manifest.
    Mismatch(Vec<String>),
}

impl CliError {
    pub fn config(key: &str, msg: &str) -> Self {
        CliError::Validation(format!("{key}: {msg}"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Core(e) => match e {
                qle_core::Error::Validation(_) | qle_core::Error::Unit(_) | qle_core::Error::Format(_) => 2,
                _ => 1,
            },
            CliError::Io(_) | CliError::Mismatch(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "[Validation] {m}"),
            CliError::Core(e) => write!(f, "[{}] {e}", e.kind()),
            CliError::Io(m) => write!(f, "[Io] {m}"),
            CliError::Mismatch(files) => write!(f, "[Mismatch] outputs differ from the manifest: {}", files.join(", ")),
        }
    }
}

impl From<qle_core::Error> for CliError {
    fn from(e: qle_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "qle", version, about = "Quantum Langevin equation toolkit")]
struct Cli {
    #[command(subcommand)]
    action: Action,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set bath.zeta=2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
    /// Cap on worker threads.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct RerunArgs {
    manifest: PathBuf,
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Action {
    /// Spectral distribution and memory function on a frequency grid.
    Bath(RunArgs),
    /// Susceptibility on a frequency grid, or the Green function on a time grid.
    Response(RunArgs),
    /// Symmetrized position autocorrelation.
    Correlate(RunArgs),
    /// Mean-square displacement.
    Msd(RunArgs),
    /// Position power spectrum.
    Spectrum(RunArgs),
    /// Free energy, energy and entropy over a temperature grid.
    FreeEnergy(RunArgs),
    /// Phase fluctuations of a current-biased Josephson junction.
    Josephson(RunArgs),
    /// Charge fluctuations of a tunnel junction in a linear circuit.
    Junction(RunArgs),
    /// Detector displacement noise.
    Detector(RunArgs),
    /// Nonrunaway motion of a radiating charge under a tabulated force.
    Radiate(RunArgs),
    /// Monte Carlo ensemble of classical Langevin paths.
    Simulate(RunArgs),
    /// Replay a run from its manifest and check the outputs are identical.
    Rerun(RerunArgs),
}

fn set_workers(workers: Option<usize>) -> Result<(), CliError> {
    if let Some(n) = workers {
        if n == 0 {
            return Err(CliError::Validation("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Runs a command and writes its outputs; returns the manifest.
fn execute(
    command: Command,
    cfg: &RunConfig,
    out: &Path,
    workers: Option<usize>,
) -> Result<manifest::Manifest, CliError> {
    let (inputs, digests) = manifest::load_inputs(cfg)?;
    let art = commands::run(command, cfg, &inputs, workers)?;
    let files = manifest::render(command, cfg, &art)?;
    let m = manifest::build(command, cfg, digests, &files)?;
    manifest::emit(out, &files, &m)?;
    Ok(m)
}

fn run_fresh(command: Command, args: RunArgs) -> Result<(), CliError> {
    set_workers(args.workers)?;
    let (text, base) = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))?;
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            (text, base)
        }
        None => (String::new(), PathBuf::new()),
    };
    let mut cfg = RunConfig::parse(&text, &args.set)?;
    let base = if base.as_os_str().is_empty() {
        std::env::current_dir().map_err(|e| CliError::Io(e.to_string()))?
    } else {
        base
    };
    cfg.resolve_paths(&base)?;
    execute(command, &cfg, &args.out, args.workers)?;
    Ok(())
}

fn rerun(args: RerunArgs) -> Result<(), CliError> {
    set_workers(args.workers)?;
    let recorded = manifest::read(&args.manifest)?;
    let (_, digests) = manifest::load_inputs(&recorded.config)?;
    manifest::check_inputs(&recorded.inputs, &digests)?;
    let m = execute(recorded.command, &recorded.config, &args.out, args.workers)?;
    let differing = manifest::differing_outputs(&recorded.outputs, &m.outputs);
    if differing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Mismatch(differing))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.action {
        Action::Bath(a) => run_fresh(Command::Bath, a),
        Action::Response(a) => run_fresh(Command::Response, a),
        Action::Correlate(a) => run_fresh(Command::Correlate, a),
        Action::Msd(a) => run_fresh(Command::Msd, a),
        Action::Spectrum(a) => run_fresh(Command::Spectrum, a),
        Action::FreeEnergy(a) => run_fresh(Command::FreeEnergy, a),
        Action::Josephson(a) => run_fresh(Command::Josephson, a),
        Action::Junction(a) => run_fresh(Command::Junction, a),
        Action::Detector(a) => run_fresh(Command::Detector, a),
        Action::Radiate(a) => run_fresh(Command::Radiate, a),
        Action::Simulate(a) => run_fresh(Command::Simulate, a),
        Action::Rerun(a) => rerun(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
