//! Command-line front end for Clifford synthesis.

mod bench;
mod common;
mod config;
mod error;
mod gen_data;
mod gods;
mod synth;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::common::Ctx;
use crate::config::ConfigFile;
use crate::error::{exit_code, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "cliffsynth", version, about = "Clifford circuit synthesis guided by a learned distance estimate")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory [default: out].
    #[arg(long, global = true, env = "CLIFFSYNTH_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Root seed for every random stream [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// More logging; repeat for debug output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    GenData(gen_data::Args),
    Train(train::Args),
    Synth(synth::Args),
    #[command(name = "gods-number")]
    GodsNumber(gods::Args),
    Bench(bench::Args),
}

fn run(cli: Cli) -> Result<()> {
    let file = ConfigFile::load(cli.config.as_deref())?;
    let seed = match cli.seed {
        Some(s) => s,
        None => file.seed()?.unwrap_or(0),
    };
    let out_dir = cli.out_dir.or_else(|| file.out_dir()).unwrap_or_else(|| PathBuf::from("out"));
    let ctx = Ctx { out_dir, seed };
    match &cli.command {
        Command::GenData(a) => gen_data::run(&ctx, &file, a),
        Command::Train(a) => train::run(&ctx, &file, a),
        Command::Synth(a) => synth::run(&ctx, &file, a),
        Command::GodsNumber(a) => gods::run(&ctx, &file, a),
        Command::Bench(a) => bench::run(&ctx, &file, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
