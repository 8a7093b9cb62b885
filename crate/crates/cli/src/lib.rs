//! Command-line front end for `fraclangevin-core`: argument grammar, the JSON
//! configuration file, the CSV dialect and the subcommands.

pub mod args;
pub mod checks;
pub mod commands;
pub mod config;
pub mod csvio;

pub use commands::{run, Io};
