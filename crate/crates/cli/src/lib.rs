//! Command-line front end for `randsamp`.
//!
//! [`run_cli`] parses an argument vector, runs one subcommand and returns the
//! process exit code: 0 on success, 1 for usage and input errors, 2 when the
//! numerics fail (every run of a batch failed, or a single recovery did).

use std::ffi::OsString;
use std::path::Path;

use clap::Parser;

pub mod args;
mod commands;

pub use commands::OUT_DIR_ENV;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("all runs failed: {0}")]
    AllRunsFailed(String),
    #[error(transparent)]
    Core(#[from] randsamp::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use randsamp::Error as E;
        match self {
            CliError::AllRunsFailed(_) => 2,
            CliError::Core(
                E::SingularSystem { .. } | E::OverSelection { .. } | E::NonConvergence { .. },
            ) => 2,
            _ => 1,
        }
    }
}

/// Reads `key = value` lines into flags. Blank lines and `#` comments are
/// skipped; `true` turns a key into a bare switch and `false` drops it.
fn config_flags(path: &Path) -> Result<Vec<String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let mut flags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config {}:{}: expected key=value, got {line:?}",
                path.display(),
                i + 1
            )));
        };
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(CliError::Usage(
                "config files cannot include other config files".into(),
            ));
        }
        match value {
            "true" => flags.push(format!("--{key}")),
            "false" => {}
            _ => flags.push(format!("--{key}={value}")),
        }
    }
    Ok(flags)
}

fn find_config(args: &[String]) -> Option<&str> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it.next().map(String::as_str);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v);
        }
    }
    None
}

/// Splices the config file's flags in right after the subcommand name, so
/// anything on the real command line comes later and overrides them.
fn expand_config(mut args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(path) = find_config(&args).map(str::to_owned) else {
        return Ok(args);
    };
    if args.len() < 2 {
        return Ok(args);
    }
    let flags = config_flags(Path::new(&path))?;
    args.splice(2..2, flags);
    Ok(args)
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Sample(a) => commands::sample(a),
        Command::BuildMatrix(a) => commands::build_matrix(a),
        Command::Recover(a) => commands::recover(a),
        Command::Experiment(a) => commands::experiment(a),
        Command::SweepP(a) => commands::sweep_p(a),
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Result<Vec<String>, OsString> =
        argv.into_iter().map(|a| a.into().into_string()).collect();
    let args = match args {
        Ok(a) => a,
        Err(bad) => {
            eprintln!("error: argument is not valid UTF-8: {bad:?}");
            return 1;
        }
    };
    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // help and version go to stdout and are not failures
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
