//! Command-line frontend for `stochdom-core`: measure and cone files, JSON
//! reports, CSV tables and gnuplot scripts.

pub mod cli;
pub mod commands;
pub mod files;
pub mod output;
pub mod report;

pub use cli::{run, Cli, EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK};
