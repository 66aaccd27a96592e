use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rbas_cli::commands::{
    cmd_gamma_table, cmd_jl_dim, cmd_locality, cmd_meany_table, cmd_solve, CommandContext,
};
use rbas_cli::config::read_config_file;
use rbas_cli::{config_hash_seed, CliError};

/// Randomized block adaptive solvers: experiment runner.
#[derive(Parser)]
#[command(name = "rbas", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Experiment seed; derived from the config file bytes when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Sample count override for the estimation commands.
    #[arg(long, global = true)]
    samples: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a solver and write history, summary, and checkpoint CSVs.
    Solve,
    /// Estimate min-det statistics over random basis redraws of row blocks.
    MeanyTable,
    /// Worst-case contraction factors for row partitions.
    GammaTable,
    /// Chunk-load and arithmetic-cost comparison of an oracle solver vs
    /// block projections.
    Locality,
    /// Embedding dimension and failure bound for a sketch ensemble.
    JlDim,
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    let (mut config, bytes) = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => (Default::default(), Vec::new()),
    };
    if let Some(samples) = cli.samples {
        config.meany.samples = samples;
        config.gamma.samples = samples;
    }
    let seed = match cli.seed {
        Some(s) => s,
        None => {
            let derived = config_hash_seed(&bytes);
            eprintln!("seed: {derived} (derived from config; pass --seed {derived} to replay)");
            derived
        }
    };
    let ctx = CommandContext {
        config: &config,
        seed,
        out_dir: &cli.out,
    };
    match cli.command {
        Command::Solve => cmd_solve(&ctx),
        Command::MeanyTable => cmd_meany_table(&ctx),
        Command::GammaTable => cmd_gamma_table(&ctx),
        Command::Locality => cmd_locality(&ctx),
        Command::JlDim => cmd_jl_dim(&ctx),
    }
}
