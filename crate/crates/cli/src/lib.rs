//! The `sepprof` command line: argument parsing, dispatch, persistence of graphs, tables
//! and reports, and plot-ready CSV.

mod args;
mod check;
mod commands;
pub mod table_io;

use std::ffi::OsString;
use std::fmt;

use clap::Parser;

pub use args::{Cli, Command};
pub use table_io::{emit_plot_data, read_profile_csv, write_profile_csv, PlotError};

use sepprof_core::bounds::BoundError;
use sepprof_core::cuts::CutError;
use sepprof_core::generators::GenError;
use sepprof_core::graph::GraphError;
use sepprof_core::profiles::ProfileError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable overriding the default enumeration cap.
pub const BUDGET_ENV: &str = "SEPPROF_BUDGET";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precondition(String),
    /// The budget ran out; whatever certified output exists has been written.
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Budget(_) => EXIT_BUDGET,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Budget(m) => write!(f, "budget exhausted: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::BudgetExceeded { .. } | ProfileError::Graph(GraphError::BudgetExceeded { .. }) => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<BoundError> for CliError {
    fn from(e: BoundError) -> Self {
        match e {
            BoundError::Profile(p) => p.into(),
            BoundError::MissingParameter(_) | BoundError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<GenError> for CliError {
    fn from(e: GenError) -> Self {
        match e {
            GenError::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<CutError> for CliError {
    fn from(e: CutError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}

impl From<PlotError> for CliError {
    fn from(e: PlotError) -> Self {
        CliError::Precondition(e.to_string())
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
/// Errors go to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("sepprof: {e}");
            e.exit_code()
        }
    }
}
