//! `cat-teleport`: runs one experiment and writes its report.
//!
//! Exit status: 0 success, 1 I/O failure, 2 invalid input, 3 numerical
//! failure (near-singular state, non-convergence, cutoff too small, engine
//! disagreement).

mod config;
mod run;

use std::fs;
use std::process::ExitCode;

use clap::Parser;

use config::{Args, ExperimentConfig, FileConfig};

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) | Failure::Io(m) => m,
        }
    }
}

impl From<cat_teleport::Error> for Failure {
    fn from(e: cat_teleport::Error) -> Self {
        match e {
            cat_teleport::Error::Io(_) => Failure::Io(e.to_string()),
            e if e.is_numerical() => Failure::Numerical(e.to_string()),
            e => Failure::Usage(e.to_string()),
        }
    }
}

fn load_file(args: &Args) -> Result<FileConfig, Failure> {
    let Some(path) = &args.config else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn execute(args: Args) -> Result<(), Failure> {
    let file = load_file(&args)?;
    let config = ExperimentConfig::resolve(args, file)?;
    let mut artifact = run::run(&config)?;
    if !artifact.ends_with('\n') {
        artifact.push('\n');
    }
    match &config.output_path {
        Some(path) => fs::write(path, artifact).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{artifact}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.exit_code())
        }
    }
}
