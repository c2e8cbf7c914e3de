//! Library side of the `cubeprop` binary, so tests can drive subcommands
//! without spawning processes.

pub mod args;
pub mod run;
pub mod verify;

use anyhow::Result;

use args::{Cli, Command};
use run::{write_out, EXIT_OK, EXIT_VERIFY_FAILED};

/// Runs one parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Solve(a) => run::solve(a).map(|(code, _)| code),
        Command::Trace(a) => run::trace(a).map(|(code, _)| code),
        Command::Bench(a) => run::bench(a).map(|(code, _)| code),
        Command::Verify(a) => {
            let report = verify::run(&verify::Config {
                quick: a.quick,
                seed: a.seed,
                fault: a.inject_fault,
            });
            eprint!("{}", verify::render(&report));
            if let Some(path) = &a.out {
                let json = serde_json::to_string_pretty(&report)? + "\n";
                write_out(Some(path), &json)?;
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}
