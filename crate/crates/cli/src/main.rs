mod config;
mod error;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, Flags};

#[derive(Debug, Parser)]
#[command(name = "remctl", version, about = "Remote quantum control experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Unitary-only versus remote control over random state pairs
    Campaign(Flags),
    /// Bloch-sphere coverage of the restricted gate family
    Reachability(Flags),
    /// Coherent-vector trajectory and angle relations of one protocol run
    Geometry(Flags),
    /// Environment-coupled control versus the clean protocol
    DecoherenceDemo(Flags),
    /// Kraus operators induced by a Hadamard on the control
    KrausDemo(Flags),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, flags) = match cli.command {
        Cmd::Campaign(f) => (Command::Campaign, f),
        Cmd::Reachability(f) => (Command::Reachability, f),
        Cmd::Geometry(f) => (Command::Geometry, f),
        Cmd::DecoherenceDemo(f) => (Command::DecoherenceDemo, f),
        Cmd::KrausDemo(f) => (Command::KrausDemo, f),
    };
    let result = config::load(cmd, &flags, std::env::var(config::SEED_ENV).ok()).and_then(|cfg| run::execute(&cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("remctl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
