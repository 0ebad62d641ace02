mod args;
mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use args::Command;
use commands::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "squeezer",
    version,
    about = "Squeezing operations of time-dependent oscillators",
    args_conflicts_with_subcommands = true
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Re-run the command recorded in a manifest.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match (cli.command, cli.manifest) {
        (Some(c), _) => c,
        (None, Some(path)) => match manifest::load(&path) {
            Ok(m) => m.command,
            Err(e) => return report(Failure::usage(e)),
        },
        (None, None) => return report(Failure::usage(anyhow::anyhow!("a subcommand or --manifest is required"))),
    };
    match commands::run(&command, &cli.out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    eprintln!("error: {:#}", f.error);
    ExitCode::from(f.code)
}
