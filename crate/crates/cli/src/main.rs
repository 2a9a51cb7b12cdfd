mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use config::{Experiment, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "ancilla",
    version,
    about = "Metrology under collective dephasing: sweeps, ratios, noise-engineering ensembles and oracle checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Precision and readout probability against interrogation time.
    Sweep(Common),
    /// Entangled/unentangled precision ratio against probe count.
    Ratio(Common),
    /// Monte Carlo ensemble of engineered-noise Ramsey runs.
    Ensemble(Common),
    /// Decoherence factor and its power-law exponent from ensembles.
    FitGamma(Common),
    /// Optimal auxiliary coupling in a partially correlated bath.
    Partial(Common),
    /// Magnetic-field sensing precision against working-qubit count.
    Field(Common),
    /// Cross-checks closed forms, Monte Carlo and the master-equation oracle.
    OracleCheck(Common),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Noise seed; overrides the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ensemble size for Monte Carlo experiments.
    #[arg(long)]
    realizations: Option<usize>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long)]
    gnuplot_script: bool,
}

impl Command {
    fn split(self) -> (Experiment, Common) {
        match self {
            Self::Sweep(c) => (Experiment::Sweep, c),
            Self::Ratio(c) => (Experiment::Ratio, c),
            Self::Ensemble(c) => (Experiment::Ensemble, c),
            Self::FitGamma(c) => (Experiment::FitGamma, c),
            Self::Partial(c) => (Experiment::Partial, c),
            Self::Field(c) => (Experiment::Field, c),
            Self::OracleCheck(c) => (Experiment::OracleCheck, c),
        }
    }
}

fn run(experiment: Experiment, args: Common) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::defaults(experiment),
    };
    if config.experiment != experiment {
        return Err(CliError::Config(format!(
            "experiment: file declares {:?} but the subcommand is {}",
            config.experiment.name(),
            experiment.name()
        )));
    }
    if let Some(m) = args.realizations {
        match experiment {
            Experiment::Ensemble | Experiment::FitGamma | Experiment::OracleCheck => {
                config.override_parameter("realizations", json!(m))
            }
            _ => return Err(CliError::Config(format!("--realizations does not apply to {}", experiment.name()))),
        }
    }
    if let Some(threads) = args.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("--threads: {e}")))?;
    }
    let seed = args.seed.or(config.seed).unwrap_or(ancilla::validation::DEFAULT_SEED);
    let out = args.out.or_else(|| config.output.clone()).unwrap_or_else(|| PathBuf::from("out"));

    let start = Instant::now();
    let report = experiments::run(&config, seed)?;
    let files: Vec<String> = report.tables.iter().map(|t| t.file_name()).collect();
    let summary = json!({
        "experiment": experiment.name(),
        "seed": seed,
        "units": config.units,
        "resolved": report.resolved,
        "results": report.results,
        "pass": report.pass,
        "files": files,
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    for path in output::write_all(&out, &report.tables, &summary, args.gnuplot_script)? {
        println!("{}", path.display());
    }
    if experiment == Experiment::OracleCheck && report.pass == Some(false) {
        let failed = report.results.as_array().map_or(0, |a| a.iter().filter(|o| o["pass"] == false).count());
        return Err(CliError::ChecksFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = cli.command.split();
    match run(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ancilla: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
