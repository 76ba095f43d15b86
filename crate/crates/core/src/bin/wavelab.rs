use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use wavelab::scenario::{run, ScenarioConfig};
use wavelab::Error;

#[derive(Parser)]
#[command(
    name = "wavelab",
    version,
    about = "Run Camassa-Holm scenarios from JSON configs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario and write its artifacts.
    Run {
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Parse and check a config without running it.
    Validate { config: PathBuf },
}

const EXIT_USAGE: u8 = 2;
const EXIT_HALT: u8 = 3;

fn fail(err: &Error) -> ExitCode {
    eprintln!("error: {err}");
    if err.is_numerical_halt() {
        ExitCode::from(EXIT_HALT)
    } else {
        ExitCode::from(EXIT_USAGE)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match cli.command {
        Command::Validate { config } => {
            match ScenarioConfig::load(&config).and_then(|c| c.validate().map(|_| c)) {
                Ok(c) => {
                    println!("ok: {} scenario, config hash {}", c.kind.name(), c.hash());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Run { config, output_dir } => {
            let mut cfg = match ScenarioConfig::load(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if output_dir.is_some() {
                cfg.output_dir = output_dir;
            }
            match run(&cfg) {
                Ok(report) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&report).expect("report serializes")
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
    }
}
