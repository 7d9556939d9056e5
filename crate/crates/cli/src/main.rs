mod args;
mod commands;
mod instance;
mod report;

use std::fmt;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

/// One-line failure with a category tag and exit code.
#[derive(Debug)]
pub struct CliError {
    category: &'static str,
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { category: "usage", code: 2, message: message.into() }
    }

    pub fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl From<entropy_perturb::Error> for CliError {
    fn from(e: entropy_perturb::Error) -> Self {
        let category = e.category();
        let code = match category {
            "parse" | "usage" => 2,
            _ => 3,
        };
        CliError { category, code, message: e.to_string() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_line = self.message.replace('\n', " ");
        write!(f, "error[{}]: {one_line}", self.category)
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("ENTROPY_PERTURB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::usage(format!("ENTROPY_PERTURB_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::usage(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    configure_threads()?;
    let (name, out) = match &cli.command {
        Command::Series(a) => ("series", commands::series(a, false).map(|s| (s, true))),
        Command::Example(a) => ("example", commands::series(a, true).map(|s| (s, true))),
        Command::Validate(a) => ("validate", commands::validate(a)),
        Command::Convergence(a) => ("convergence", commands::convergence(a).map(|s| (s, true))),
    };
    out.map_err(|e| e.context(name))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok((out, pass)) => {
            let _ = std::io::stdout().lock().write_all(out.as_bytes());
            if pass {
                ExitCode::SUCCESS
            } else {
                eprintln!("error[validation]: validate: one or more checks exceeded their tolerance");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
