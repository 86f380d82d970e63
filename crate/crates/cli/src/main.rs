use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use opseq_cli::{render, run_experiment, ConfigError, Experiment, PartialConfig};

/// Exit status for an invalid configuration or command line.
const EXIT_CONFIG: u8 = 2;
/// Exit status when an input was rejected while running the harness.
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "opseq",
    version,
    about = "Convergence experiments for sequences of self-adjoint operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Square-root contraction on random PSD pairs
    LemmaFuzz(Flags),
    /// Squeeze rule on generated sandwich instances
    Sandwich(Flags),
    /// Symmetrized shift powers on sequence space
    ShiftDemo(Flags),
    /// Residual trajectories and verdicts for a decaying perturbation
    Classify(Flags),
    /// Products of dominated and vanishing commuting factors
    DominatedProduct(Flags),
    /// Search for pairs with -B <= A <= B but not |A| <= B
    IntervalCounterexample(Flags),
}

#[derive(Args)]
struct Flags {
    /// Experiment configuration file (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

impl Command {
    fn split(self) -> (Experiment, Flags) {
        match self {
            Command::LemmaFuzz(f) => (Experiment::LemmaFuzz, f),
            Command::Sandwich(f) => (Experiment::Sandwich, f),
            Command::ShiftDemo(f) => (Experiment::ShiftDemo, f),
            Command::Classify(f) => (Experiment::Classify, f),
            Command::DominatedProduct(f) => (Experiment::DominatedProduct, f),
            Command::IntervalCounterexample(f) => (Experiment::IntervalCounterexample, f),
        }
    }
}

fn load(experiment: Experiment, flags: &Flags) -> Result<opseq_cli::ExperimentConfig, ConfigError> {
    let text = fs::read_to_string(&flags.config)
        .map_err(|e| ConfigError(vec![format!("cannot read {}: {e}", flags.config.display())]))?;
    let mut partial = PartialConfig::parse(&text)?;
    partial.experiment = Some(experiment);
    partial.seed = flags.seed.or(partial.seed);
    partial.n_max = flags.n_max.or(partial.n_max);
    partial.dim = flags.dim.or(partial.dim);
    partial.tol = flags.tol.or(partial.tol);
    partial.out = flags.out.clone().or(partial.out);
    partial.resolve()
}

fn main() -> ExitCode {
    let (experiment, flags) = Cli::parse().command.split();
    let cfg = match load(experiment, &flags) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("opseq: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let bundle = match run_experiment(&cfg) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("opseq: {experiment}: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let text = render(&bundle);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("opseq: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_RUNTIME);
            }
        }
        None => print!("{text}"),
    }
    for c in bundle.summary.failed_checks() {
        eprintln!("opseq: {}", opseq_cli::report::check_line(c));
    }
    if bundle.summary.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
