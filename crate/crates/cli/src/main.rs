mod commands;
mod files;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Failure;

pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_REFUTED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "listedit", version, about = "List-decodable insertion/deletion codes")]
struct Cli {
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Edit balls: enumeration, or `ball bound` for the size bound.
    Ball(BallArgs),
    /// Exhaustive bias of the powering generator.
    Bias(commands::BiasArgs),
    /// Sync sequences: sample, search, verify.
    #[command(subcommand)]
    Sync(SyncCommand),
    /// Random linear codes against the list-decoding capacity bound.
    Capacity(commands::CapacityArgs),
    /// Derived parameters for a given gamma and block count.
    Params(commands::ParamsArgs),
    Encode(commands::EncodeArgs),
    /// Random insertions and deletions.
    Corrupt(commands::CorruptArgs),
    Decode(commands::DecodeArgs),
    /// Outer list recovery from a boxes file.
    Recover(commands::RecoverArgs),
    Rate(commands::RateArgs),
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct BallArgs {
    #[command(subcommand)]
    command: Option<BallCommand>,
    #[command(flatten)]
    enumerate: commands::BallEnumerateArgs,
}

#[derive(Subcommand, Debug)]
enum BallCommand {
    Bound(commands::BallBoundArgs),
}

#[derive(Subcommand, Debug)]
enum SyncCommand {
    Sample(commands::SampleArgs),
    Search(commands::SearchArgs),
    Verify(commands::VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Write the JSON result here instead of stdout.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::precondition(anyhow::anyhow!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Ball(BallArgs { command: Some(BallCommand::Bound(a)), .. }) => commands::ball_bound(a),
        Command::Ball(BallArgs { enumerate, .. }) => commands::ball_enumerate(enumerate),
        Command::Bias(a) => commands::bias(a),
        Command::Sync(SyncCommand::Sample(a)) => commands::sync_sample(a),
        Command::Sync(SyncCommand::Search(a)) => commands::sync_search(a),
        Command::Sync(SyncCommand::Verify(a)) => commands::sync_verify(a),
        Command::Capacity(a) => commands::capacity(a),
        Command::Params(a) => commands::params(a),
        Command::Encode(a) => commands::encode(a),
        Command::Corrupt(a) => commands::corrupt(a),
        Command::Decode(a) => commands::decode(a),
        Command::Recover(a) => commands::recover(a),
        Command::Rate(a) => commands::rate(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
