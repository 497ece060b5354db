//! Command implementations behind the `biphoton` binary.

pub mod cli;
pub mod commands;
pub mod exit;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use cli::{Cli, Command};
pub use exit::{CliError, ExitCode};

/// Parse `args` (program name first), run the command and return its exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { ExitCode::Config as i32 } else { ExitCode::Ok as i32 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match commands::dispatch(&cli, out, err) {
        Ok(code) => code as i32,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code as i32
        }
    }
}
