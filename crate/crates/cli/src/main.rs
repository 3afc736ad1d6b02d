use std::process::ExitCode;

use clap::{Parser, Subcommand};

use storyboard_cli::commands::{BenchArgs, ProcgenArgs, SelectArgs, StoryboardArgs, StylizeArgs};

/// Storyboards from video frames: selection, stylization and page layout.
#[derive(Debug, Parser)]
#[command(name = "storyboard", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    Select(SelectArgs),
    Stylize(StylizeArgs),
    Storyboard(StoryboardArgs),
    Bench(BenchArgs),
    Procgen(ProcgenArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Select(a) => a.run(),
        Command::Stylize(a) => a.run(),
        Command::Storyboard(a) => a.run(),
        Command::Bench(a) => a.run(),
        Command::Procgen(a) => a.run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
