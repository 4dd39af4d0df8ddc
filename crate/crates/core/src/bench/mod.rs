//! Input generation, reporting and the command-line driver.

pub mod cli;
pub mod generate;
pub mod report;

pub use cli::{run, BenchTarget, Cli, CliError, Command, Options};
pub use generate::{generate, generate_raw, Distribution};
pub use report::{BenchRow, Format};
