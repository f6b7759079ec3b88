//! Command-line front end: grid evaluation of the library's solutions,
//! CSV/JSON writers and the verification runner.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod grid;
pub mod output;

pub use commands::{execute, pool_from_env, Command};
pub use config::{Format, RunConfig};
pub use error::{CliError, Result, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAILED};
pub use grid::GridSpec;
pub use output::{Cell, Table};
