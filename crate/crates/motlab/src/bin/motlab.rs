//! `motlab <command> [--d N] [--p X | --norm one|inf] [--trials N] [--seed U64]
//! [--grid N] [--ball R] [--jobs N] [--out PREFIX]`
//!
//! Exit codes: 0 ok, 1 internal or i/o, 2 configuration, 3 a run's own check
//! failed, 4 unsupported dimension.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use motlab::harness::{self, Command, CostSpec, ExperimentConfig, HarnessError, Tolerances};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum NormTag {
    One,
    Inf,
}

#[derive(Debug, Parser)]
#[command(name = "motlab", version, about = "Structure sets of martingale transport couplings")]
struct Cli {
    #[arg(value_enum)]
    command: CommandArg,
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Power-distance exponent.
    #[arg(long, conflicts_with = "norm", default_value_t = 0.5)]
    p: f64,
    #[arg(long, value_enum)]
    norm: Option<NormTag>,
    /// Defaults to 100 for support, 10000 for experiment, 1 otherwise.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Lattice points per axis (lp-verify).
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Starting ball radius (lp-verify); halved on failure.
    #[arg(long, default_value_t = 0.05)]
    ball: f64,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Support report for plot, family file for completeness and experiment.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CommandArg {
    Support,
    Plot,
    LpVerify,
    Completeness,
    Experiment,
}

impl From<CommandArg> for Command {
    fn from(c: CommandArg) -> Self {
        match c {
            CommandArg::Support => Command::Support,
            CommandArg::Plot => Command::Plot,
            CommandArg::LpVerify => Command::LpVerify,
            CommandArg::Completeness => Command::Completeness,
            CommandArg::Experiment => Command::Experiment,
        }
    }
}

fn config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let cost = match cli.norm {
        Some(NormTag::One) => CostSpec::OneNorm,
        Some(NormTag::Inf) => CostSpec::InfNorm,
        None => CostSpec::Power(cli.p),
    };
    let command = Command::from(cli.command);
    let mut cfg = ExperimentConfig::new(command, cli.d, cost);
    cfg.trials = cli.trials.unwrap_or(command.default_trials());
    cfg.seed = cli.seed;
    cfg.grid = cli.grid;
    cfg.ball = cli.ball;
    cfg.jobs = cli.jobs;
    cfg.input = cli.input.clone();
    cfg.tolerances = Tolerances::from_env()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<i32, HarnessError> {
    let cfg = config(cli)?;
    let artifacts = harness::run(&cfg)?;
    let prefix = cli.out.clone().unwrap_or_else(|| PathBuf::from(format!("motlab-{}", cli.command.to_possible_value().unwrap().get_name())));
    for path in artifacts.write(&prefix)? {
        eprintln!("wrote {}", path.display());
    }
    println!("{}", artifacts.summary);
    Ok(artifacts.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("motlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
