use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use toricstack_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, out, err) = execute(&cli);
    std::io::stdout().write_all(out.as_bytes()).ok();
    std::io::stderr().write_all(err.as_bytes()).ok();
    ExitCode::from(code as u8)
}
