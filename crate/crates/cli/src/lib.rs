//! Command-line front end for `dirac-core`: spectra, spinors, parameter
//! maps, point canonical transformations and the verification suite.
//!
//! [`run`] is the whole program; `main` only forwards the process arguments
//! and exit code.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use error::CliError;
use output::Format;

/// Runs one invocation and returns the exit code.
pub fn run(argv: Vec<OsString>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let argv = match args::merge_config(argv) {
        Ok(a) => a,
        Err(e) => return report(&e, stderr),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let command = echo(&argv);
    let result = match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a, cli.format.unwrap_or(Format::Table), &command),
        Command::Wavefunction(a) => commands::wavefunction(a, cli.format.unwrap_or(Format::Csv), &command, cli.out.as_deref()),
        Command::Verify(a) => commands::verify(a, cli.format.unwrap_or(Format::Json), &command),
        Command::Maps(a) => commands::maps(a, cli.format.unwrap_or(Format::Table), &command),
        Command::Xpct(a) => commands::xpct(a, cli.format.unwrap_or(Format::Table), &command),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => return report(&e, stderr),
    };
    let body = output::finish(outcome.rendered, start.elapsed().as_secs_f64());
    let written = match &cli.out {
        Some(path) => std::fs::write(path, body).map_err(|e| CliError::Io { path: path.display().to_string(), source: e }),
        None => stdout.write_all(body.as_bytes()).map_err(|e| CliError::Io { path: "stdout".into(), source: e }),
    };
    match written {
        Ok(()) => outcome.code,
        Err(e) => report(&e, stderr),
    }
}

fn report(e: &CliError, stderr: &mut dyn Write) -> i32 {
    let _ = writeln!(stderr, "error: {e}");
    if matches!(e, CliError::Usage(_)) {
        let _ = write!(stderr, "\n{}", Cli::command().render_usage());
        let _ = writeln!(stderr, "\n\nFor more information, try '--help'.");
    }
    e.exit_code()
}

/// The invocation without the program path.
fn echo(argv: &[OsString]) -> String {
    let mut parts = vec!["dirac".to_string()];
    parts.extend(argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    parts.join(" ")
}
