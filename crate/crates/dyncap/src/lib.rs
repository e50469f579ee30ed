//! File formats and command-line front end for `dyncap-core`.

pub mod cli;
pub mod error;
pub mod formats;
pub mod spec;

pub use cli::run;
pub use error::CliError;
