//! Command-line front end for `homology_lab`.
//!
//! [`run`] parses arguments, runs one subcommand and returns the exit code
//! together with what should go to standard output and standard error, so
//! the binary is a thin wrapper and tests can drive it in-process.

mod args;
mod commands;
mod config;

use std::ffi::OsString;

use clap::Parser;
use serde_json::json;

pub use args::{Cli, Command, Mode};
pub use config::RunConfig;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "HOMOLOGY_LAB_SEED";

/// Stochastic runs on inputs up to this many simplices also print the exact
/// answer, and default to the oracle step threshold.
pub const ORACLE_SIZE_GATE: usize = 500;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub(crate) enum CliError {
    Usage(String),
    Lib(homology_lab::Error),
}

impl From<homology_lab::Error> for CliError {
    fn from(e: homology_lab::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Lib(e) if e.is_invariant_violation() => 3,
            _ => 2,
        }
    }

    fn diagnostic(&self) -> String {
        let (kind, message) = match self {
            CliError::Usage(m) => ("Usage", m.clone()),
            CliError::Lib(e) => (e.kind(), e.to_string()),
        };
        json!({ "error": kind, "message": message, "exit_code": self.code() }).to_string()
    }
}

pub(crate) type CliResult<T> = std::result::Result<T, CliError>;

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => fail(CliError::Usage(e.to_string()), String::new()),
            };
        }
    };

    let (seed, note) = match resolve_seed(cli.seed) {
        Ok(s) => s,
        Err(e) => return fail(e, String::new()),
    };
    let note = note.map(|s| format!("seed: {s}\n")).unwrap_or_default();

    let result = match cli.threads {
        Some(0) => Err(CliError::Usage("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli, seed)),
            Err(e) => Err(CliError::Usage(format!("cannot build thread pool: {e}"))),
        },
        None => commands::dispatch(&cli, seed),
    };
    match result {
        Ok(value) => Outcome {
            code: 0,
            stdout: format!("{value}\n"),
            stderr: note,
        },
        Err(e) => fail(e, note),
    }
}

fn fail(e: CliError, mut stderr: String) -> Outcome {
    stderr.push_str(&e.diagnostic());
    stderr.push('\n');
    Outcome {
        code: e.code(),
        stdout: String::new(),
        stderr,
    }
}

/// The seed and, when it was drawn fresh, the value to announce.
fn resolve_seed(flag: Option<u64>) -> CliResult<(u64, Option<u64>)> {
    if let Some(s) = flag {
        return Ok((s, None));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, None))
            .map_err(|_| CliError::Usage(format!("{SEED_ENV} is not an unsigned integer: {v:?}"))),
        Err(_) => {
            let s = rand::random();
            Ok((s, Some(s)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_violations_exit_with_three() {
        let e = CliError::Lib(homology_lab::Error::RouteDisagreement { route_a: 1, route_b: 2 });
        assert_eq!(e.code(), 3);
        assert_eq!(CliError::Lib(homology_lab::Error::EmptyLayer(5)).code(), 2);
        assert_eq!(CliError::Usage("x".into()).code(), 2);
        let d: serde_json::Value = serde_json::from_str(&e.diagnostic()).unwrap();
        assert_eq!(d["error"], "RouteDisagreement");
        assert_eq!(d["exit_code"], 3);
    }

    #[test]
    fn help_is_not_an_error() {
        let out = run(["homology-lab", "--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("persistent-betti"));
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let out = run(["homology-lab", "frobnicate"]);
        assert_eq!(out.code, 2);
        assert!(out.stderr.contains("\"error\":\"Usage\""));
    }
}
