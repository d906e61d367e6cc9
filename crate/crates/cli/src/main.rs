//! `hyperconnect`: evaluate solutions, print connection matrices, run the
//! verification suites and the quadrature oracle.
//!
//! Exit status: 0 success, 1 failed verification, 2 configuration error,
//! 3 numerical refusal. Errors are printed to stderr as one JSON object.

mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use commands::Cli;

/// Failure of a command, carrying the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "config".into(),
            message: message.into(),
        }
    }
}

impl From<hyperconnect::Error> for Failure {
    fn from(e: hyperconnect::Error) -> Self {
        Failure {
            code: if e.is_config_error() { 2 } else { 3 },
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        // a closed downstream pipe (`| head`) is not an error
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure {
                code: 0,
                kind: "broken_pipe".into(),
                message: String::new(),
            };
        }
        Failure {
            code: 2,
            kind: "io".into(),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            report(&Failure {
                code: 2,
                kind: "usage".into(),
                message: e.to_string().trim_end().to_string(),
            });
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let status = commands::run(cli, &mut out);
    let _ = out.flush();
    match status {
        Ok(code) => ExitCode::from(code),
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}

fn report(f: &Failure) {
    let doc = serde_json::json!({
        "error": f.kind,
        "message": f.message,
        "exit_code": f.code,
    });
    eprintln!("{doc}");
}
