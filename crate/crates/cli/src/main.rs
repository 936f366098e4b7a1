//! Command-line runner.
//!
//! Exit codes: 0 on success, 2 for invalid configuration or flags, 3 when a
//! beamformer degenerates, 1 for anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cellfree::runner::{self, Algorithm, RunOptions};
use cellfree::scenario::NetworkConfig;
use cellfree::teammse::BeamformingRule;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "cellfree", version, about = "Joint max-min power control and team-MMSE beamforming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one joint optimization and write its artifacts.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        /// Max-min weights as a comma-separated list, or "uniform".
        #[arg(long)]
        weights: Option<String>,
    },
    /// Run once per weight vector on the same drop.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// One weight vector (comma-separated); repeat for every point.
        #[arg(long = "weights", required = true)]
        weights: Vec<String>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Configuration JSON; the reference network if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Ao)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = BeamformerArg::Tmmse)]
    beamformer: BeamformerArg,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long = "max-iters", default_value_t = 100)]
    max_iters: usize,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Fp,
    Ao,
}

#[derive(Clone, Copy, ValueEnum)]
enum BeamformerArg {
    Tmmse,
    Mf,
}

/// Error raised before any computation starts.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn load_config(path: Option<&Path>) -> anyhow::Result<NetworkConfig> {
    match path {
        Some(p) => NetworkConfig::from_json_file(p)
            .map_err(|e| UsageError(format!("cannot load config {}: {e}", p.display())).into()),
        None => Ok(NetworkConfig::default()),
    }
}

fn parse_weights(text: &str, k: usize) -> anyhow::Result<Vec<f64>> {
    if text.trim().eq_ignore_ascii_case("uniform") {
        return Ok(vec![1.0; k]);
    }
    text.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| UsageError(format!("invalid weight {s:?}")).into()))
        .collect()
}

fn options(common: &CommonArgs) -> RunOptions {
    RunOptions {
        algorithm: match common.algorithm {
            AlgorithmArg::Fp => Algorithm::Fp,
            AlgorithmArg::Ao => Algorithm::Ao,
        },
        rule: match common.beamformer {
            BeamformerArg::Tmmse => BeamformingRule::TeamMmse,
            BeamformerArg::Mf => BeamformingRule::MatchedFilter,
        },
        weights: None,
        seed: common.seed,
        tol: common.tol,
        max_iter: common.max_iters,
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Run { common, weights } => {
            let config = load_config(common.config.as_deref())?;
            let mut opts = options(&common);
            opts.weights = weights.map(|w| parse_weights(&w, config.num_ues)).transpose()?;
            let output = runner::run(&config, &opts)?;
            runner::write_artifacts(&common.out, &output)?;
            println!(
                "min rate {:.6} bit/s/Hz, {} rounds, converged: {}",
                output.result.min_rate, output.result.iterations, output.result.converged
            );
        }
        Command::Sweep { common, weights } => {
            let config = load_config(common.config.as_deref())?;
            let list = weights.iter().map(|w| parse_weights(w, config.num_ues)).collect::<anyhow::Result<Vec<_>>>()?;
            let outputs = runner::sweep_weights(&config, &options(&common), &list)?;
            for (i, output) in outputs.iter().enumerate() {
                runner::write_artifacts(&common.out.join(format!("sweep_{i:03}")), output)?;
                println!("{i}: weights {:?} -> rates {:?}", output.result.config.weights, output.result.rates);
            }
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<cellfree::Error>() {
        Some(cellfree::Error::Config(_) | cellfree::Error::Json(_) | cellfree::Error::InvalidInput(_)) => 2,
        Some(cellfree::Error::Degenerate { .. } | cellfree::Error::SingularSystem { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
