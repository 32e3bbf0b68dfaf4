//! The `qdd` command-line front end.

pub mod args;
pub mod bench;
mod commands;
pub mod report;
pub mod watchdog;

pub use commands::{EXIT_ERROR, EXIT_NOT_EQUIVALENT, EXIT_OK, EXIT_TIMEOUT};

use args::{Cli, Command};

/// Run a parsed command line and return the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Sim { file, run } => commands::cmd_sim(&file, &run),
        Command::Eqcheck { u, v, algorithm, run } => commands::cmd_eqcheck(&u, &v, algorithm.into(), &run),
        Command::Bench { dir, mode, algorithm, baseline, run } => {
            let mut out = std::io::stdout().lock();
            match bench::run_bench(&dir, mode, algorithm.into(), baseline.as_deref(), &run, &mut out) {
                Ok(_) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e:#}");
                    EXIT_ERROR
                }
            }
        }
    }
}
