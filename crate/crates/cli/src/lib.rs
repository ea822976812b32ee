//! Command-line front end: fan files in, presentations and verification
//! reports out.

pub mod commands;
pub mod input;
pub mod report;

pub use commands::{execute, run, Cli, Command, RunError};
pub use input::{parse, FanFile, InputError};
pub use report::Report;
