//! `ris-sim`: run one experiment per invocation.
//!
//! Exit codes: 0 success, 2 config error, 1 runtime error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_sim::config::{ExperimentKind, OutputFormat};
use ris_sim::table::Provenance;
use ris_sim::{config_hash, parse_config, run_experiment};

#[derive(Parser)]
#[command(
    name = "ris-sim",
    version,
    about = "RIS channel experiments: path loss sweeps, fading ACFs, hardening, multipath estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate path loss models on one scene.
    Pathloss(RunArgs),
    /// Move the panel along the Tx/Rx ellipse and tabulate path loss.
    SweepEllipse(RunArgs),
    /// Compare received power across phase profiles.
    PhaseGain(RunArgs),
    /// Temporal ACF with and without RIS phase tracking.
    Acf(RunArgs),
    /// Channel hardening statistics over element counts.
    Hardening(RunArgs),
    /// Multipath parameter estimation RMSEE over SNR and mode counts.
    Estimate(RunArgs),
    /// Doppler spread, delay spread, rank and condition number.
    Metrics(RunArgs),
}

impl Command {
    fn kind(&self) -> ExperimentKind {
        match self {
            Command::Pathloss(_) => ExperimentKind::Pathloss,
            Command::SweepEllipse(_) => ExperimentKind::SweepEllipse,
            Command::PhaseGain(_) => ExperimentKind::PhaseGain,
            Command::Acf(_) => ExperimentKind::Acf,
            Command::Hardening(_) => ExperimentKind::Hardening,
            Command::Estimate(_) => ExperimentKind::Estimate,
            Command::Metrics(_) => ExperimentKind::Metrics,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Pathloss(a)
            | Command::SweepEllipse(a)
            | Command::PhaseGain(a)
            | Command::Acf(a)
            | Command::Hardening(a)
            | Command::Estimate(a)
            | Command::Metrics(a) => a,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted (and the config names no path).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format; overrides the config's choice.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(message)) => {
            eprintln!("config error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

enum Failure {
    Config(String),
    Runtime(String),
}

fn run(command: &Command) -> Result<(), Failure> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    let mut config = parse_config(&text).map_err(|e| Failure::Config(e.to_string()))?;
    if config.kind != command.kind() {
        return Err(Failure::Config(format!(
            "config kind \"{}\" does not match the \"{}\" subcommand",
            config.kind.name(),
            command.kind().name()
        )));
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }

    let provenance = Provenance {
        config_sha256: config_hash(&text),
        seed: config.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
    };
    let table = run_experiment(&config, provenance).map_err(|e| Failure::Runtime(e.to_string()))?;
    table.check().map_err(|e| Failure::Runtime(e.to_string()))?;

    let format = args
        .format
        .map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        })
        .or(config.output.as_ref().and_then(|o| o.format))
        .unwrap_or_default();
    let rendered = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    };

    let out_path = args.out.clone().or_else(|| {
        config
            .output
            .as_ref()
            .and_then(|o| o.path.as_ref().map(PathBuf::from))
    });
    match out_path {
        Some(path) => write_atomically(&path, rendered.as_bytes())
            .map_err(|e| Failure::Runtime(format!("{}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

/// Write via a temp file in the destination directory plus rename, so a
/// crash never leaves a half-written table.
fn write_atomically(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
