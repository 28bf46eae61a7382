//! Command-line front end for the stochastic TV flow scheme.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use args::{Cli, Command, Overrides};
pub use config::{DriftChoice, RunConfig};
pub use error::{CliError, CliResult, ErrorRecord};

pub fn run(command: &Command) -> CliResult<()> {
    let cfg = command.overrides().resolve()?;
    match command {
        Command::Simulate(_) => commands::simulate(&cfg),
        Command::CheckLemma(_) => commands::check_lemma(&cfg),
        Command::CheckSvi(_) => commands::check_svi(&cfg),
        Command::Converge(_) => commands::converge(&cfg),
        Command::Denoise(_) => commands::run_denoise(&cfg),
    }
}
