//! Text format and subcommands behind the `wcsp` binary.

pub mod commands;
pub mod format;

pub use commands::{CliError, CliResult, GenerateOptions, Method, Output, Settings};
pub use format::{parse, write, ParseError, ProblemFile};
