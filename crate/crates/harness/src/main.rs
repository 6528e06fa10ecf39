use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use betting_ope_cli::{run_experiment, Experiment, ExperimentConfig, HarnessError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "betting-ope", version, about = "Anytime-valid off-policy confidence sequences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment named in the config (`experiment = ...`, default trace).
    Run(Common),
    /// Time-uniform coverage over random max-entropy environments.
    Coverage(Common),
    /// Width curves on the four fixed environments.
    Width(Common),
    /// Wall-clock per method at a fixed sample size.
    Timing(Common),
    /// Plain, predictor and doubly hedged widths.
    Predictor(Common),
    /// Deploy/discard decisions for a policy difference.
    Gated(Common),
    /// Fixed-sample interval from permuted orderings.
    Ci(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set seeds=3`. Repeatable.
    #[arg(short = 's', long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// JSONL log (`w`, `r`, optional `c` or `q_taken`/`q_bar`).
    #[arg(short, long)]
    input: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<HarnessError>().map_or(1, HarnessError::exit_code);
            ExitCode::from(code as u8)
        }
    }
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    let (kind, common) = match cli.command {
        Command::Run(c) => (None, c),
        Command::Coverage(c) => (Some(Experiment::Coverage), c),
        Command::Width(c) => (Some(Experiment::Width), c),
        Command::Timing(c) => (Some(Experiment::Timing), c),
        Command::Predictor(c) => (Some(Experiment::Predictor), c),
        Command::Gated(c) => (Some(Experiment::Gated), c),
        Command::Ci(c) => (Some(Experiment::Ci), c),
    };
    let mut overrides = common.overrides;
    if let Some(p) = common.input {
        overrides.push(format!("input={}", p.display()));
    }
    if let Some(p) = common.output {
        overrides.push(format!("output={}", p.display()));
    }
    let cfg = ExperimentConfig::load(kind, common.config.as_deref(), &overrides)?;
    let report = run_experiment(&cfg)
        .with_context(|| format!("{} experiment failed", cfg.experiment))?;
    print!("{report}");
    Ok(())
}
