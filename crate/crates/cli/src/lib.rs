//! Command-line front end for the resetting-search library.
//!
//! Every subcommand resolves its flags into a [`output::RunSpec`], runs the
//! owning library module over the requested parameter grid, and emits one
//! artifact: CSV with a `#`-prefixed metadata preamble or JSON with a
//! top-level `{meta, rows}` object. The metadata embeds the full resolved
//! parameter set and a replay line, so any artifact can be reproduced from
//! itself; identical specs (and seeds) produce byte-identical files.
//!
//! Errors carry one of three categories, mapped to distinct exit codes and
//! printed machine-readably as `error[<category>]: <message>`:
//!
//! | category | code | meaning                                    |
//! |----------|------|--------------------------------------------|
//! | `usage`  | 2    | unparseable flags or inconsistent flag set |
//! | `domain` | 3    | a module precondition rejected the values  |
//! | `io`     | 4    | the artifact could not be written          |

pub mod args;
pub mod commands;
pub mod grid;
pub mod output;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

/// Errors surfaced to the shell.
#[derive(Debug, Error)]
pub enum CliError {
    /// The flag set itself is wrong (unknown syntax, missing or
    /// contradictory flags).
    #[error("{0}")]
    Usage(String),
    /// The flags parsed but a library precondition rejected the values.
    #[error("{0}")]
    Domain(String),
    /// The artifact could not be written.
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Machine-readable category printed in the `error[...]` prefix.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Domain(_) => "domain",
            CliError::Io(_) => "io",
        }
    }

    /// Process exit code for this category.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

macro_rules! domain_error {
    ($($ty:path),* $(,)?) => {$(
        impl From<$ty> for CliError {
            fn from(err: $ty) -> Self {
                CliError::Domain(err.to_string())
            }
        }
    )*};
}

domain_error!(
    reset_search::eigen1d::Eigen1dError,
    reset_search::eigen_radial::EigenRadialError,
    reset_search::mc::McError,
    reset_search::speed::SpeedError,
    reset_search::target::TargetError,
);

/// Parses the process arguments, runs the command, and reports errors on
/// standard error; returns the process exit code.
pub fn run_main() -> i32 {
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let informational =
                matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = err.print();
            if informational {
                return 0;
            }
            eprintln!("error[usage]: invalid command line");
            return 2;
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error[{}]: {}", err.category(), err);
            err.exit_code()
        }
    }
}

/// Executes a parsed command and writes its artifact.
pub fn run(cli: &args::Cli) -> Result<(), CliError> {
    let (spec, table) = commands::execute(cli)?;
    output::write_artifact(&spec, &table)
}
