//! Command line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{exit, SimError};
use crate::experiments::{self, Experiment, RunOptions};
use crate::scenario_io::{load_scenario, read_scenario};

/// Monte-Carlo simulator for multibeam high-throughput satellite systems.
#[derive(Debug, Parser)]
#[command(name = "hts-sim", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one experiment and write its result table into the output directory.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_enum)]
        experiment: Experiment,
        /// Override `simulation.monte_carlo_trials`.
        #[arg(long)]
        trials: Option<u32>,
        /// Override `simulation.seed`.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
        /// Worker threads for the trial pool.
        #[arg(long, env = "HTS_WORKERS")]
        workers: Option<usize>,
    },
    /// Check a scenario and list every issue without running anything.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Execute a parsed command, returning the process exit code.
pub fn execute(cli: Cli, out: &mut impl Write, err: &mut impl Write) -> u8 {
    match cli.command {
        Command::Validate { scenario } => validate(&scenario, out, err),
        Command::Run { scenario, experiment, trials, seed, out: dir, workers } => {
            if trials == Some(0) {
                let _ = writeln!(err, "error: --trials must be >= 1");
                return exit::USAGE;
            }
            let result = load_scenario(&scenario)
                .and_then(|loaded| experiments::run(&loaded, experiment, RunOptions { trials, seed, workers }))
                .and_then(|output| output.write(&dir));
            match result {
                Ok(paths) => {
                    for p in paths {
                        let _ = writeln!(out, "{}", p.display());
                    }
                    exit::OK
                }
                Err(e) => report(e, err),
            }
        }
    }
}

fn report(e: SimError, err: &mut impl Write) -> u8 {
    if let SimError::Validation(issues) = &e {
        for i in issues {
            let _ = writeln!(err, "{i}");
        }
    }
    let _ = writeln!(err, "error: {e}");
    e.exit_code()
}

fn validate(path: &std::path::Path, out: &mut impl Write, err: &mut impl Write) -> u8 {
    let loaded = match read_scenario(path) {
        Ok(l) => l,
        Err(e) => return report(e, err),
    };
    let issues = loaded.scenario.diagnostics();
    for i in &issues {
        let _ = writeln!(out, "{i}");
    }
    let noun = if issues.len() == 1 { "issue" } else { "issues" };
    let _ = writeln!(out, "{} {noun}", issues.len());
    if issues.is_empty() {
        exit::OK
    } else {
        exit::VALIDATION
    }
}

/// Parse process arguments and run.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, &mut std::io::stdout(), &mut std::io::stderr()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                exit::USAGE
            } else {
                exit::OK
            }
        }
    }
}
