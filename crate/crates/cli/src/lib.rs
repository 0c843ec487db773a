//! Command-line front end for `facet_volumes`.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 invalid geometry,
//! 3 input rejected by the cone test, 4 convergence or check failure.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod input;
pub mod roundtrip;
pub mod sample;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use facet_volumes::Error;

pub use args::{Cli, Command, Format};
pub use roundtrip::{roundtrip, RoundtripOptions, RoundtripReport, Status};
pub use sample::{sample_record, sample_records, SampleRecord};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_GEOMETRY: u8 = 2;
pub const EXIT_REJECTED: u8 = 3;
pub const EXIT_CONVERGENCE: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io(_) | CliError::Json(_) => EXIT_USAGE,
            CliError::CheckFailed(_) => EXIT_CONVERGENCE,
            CliError::Core(e) => core_exit_code(e),
        }
    }
}

pub fn core_exit_code(e: &Error) -> u8 {
    match e {
        Error::ConeViolation(_) => EXIT_REJECTED,
        Error::NoConvergence { .. }
        | Error::NoProgress(_)
        | Error::GenericityExhausted(_)
        | Error::SamplingFailure(_) => EXIT_CONVERGENCE,
        _ => EXIT_GEOMETRY,
    }
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub count: Option<usize>,
    pub seed: u64,
    pub tol_cone: f64,
    pub tol_area: f64,
    pub tol_residual: f64,
    pub tol_distinct: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let g = &cli.global;
        for (name, v) in [
            ("--tol-cone", g.tol_cone),
            ("--tol-area", g.tol_area),
            ("--tol-residual", g.tol_residual),
            ("--tol-distinct", g.tol_distinct),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive, got {v}")));
            }
        }
        if g.count == Some(0) {
            return Err(CliError::Usage("--count must be at least 1".into()));
        }
        Ok(Self {
            command: command_name(&cli.command),
            d: g.d,
            n: g.n,
            count: g.count,
            seed: g.seed,
            tol_cone: g.tol_cone,
            tol_area: g.tol_area,
            tol_residual: g.tol_residual,
            tol_distinct: g.tol_distinct,
            out: g.out.clone(),
            format: g.format,
        })
    }

    pub fn output(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.out {
            Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
            None => Box::new(std::io::BufWriter::new(std::io::stdout().lock())),
        })
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Volumes(_) => "volumes",
        Command::Classify(_) => "classify",
        Command::Membership(_) => "membership",
        Command::SolveNormals(_) => "solve-normals",
        Command::Reconstruct(_) => "reconstruct",
        Command::Roundtrip(_) => "roundtrip",
        Command::Sample => "sample",
        Command::Polar => "polar",
        Command::LatitudeCheck(_) => "latitude-check",
    }
}

/// Parses `args` (including the program name), runs the command and returns its exit code.
pub fn run_from_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::from_cli(cli)?;
    match &cli.command {
        Command::Volumes(a) => commands::volumes(&cfg, a),
        Command::Classify(a) => commands::classify(&cfg, a),
        Command::Membership(a) => commands::membership(&cfg, &a.alpha),
        Command::SolveNormals(a) => commands::solve_normals(&cfg, &a.alpha),
        Command::Reconstruct(a) => commands::reconstruct(&cfg, &a.input),
        Command::Roundtrip(a) => commands::roundtrip(&cfg, &a.alpha),
        Command::Sample => commands::sample(&cfg),
        Command::Polar => commands::polar(&cfg),
        Command::LatitudeCheck(a) => commands::latitude_check(&cfg, a.circles),
    }
}

pub fn main_exit() -> ExitCode {
    ExitCode::from(run_from_args(std::env::args_os()))
}
