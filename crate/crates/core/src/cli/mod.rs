//! Command-line driver. Emits CSV or JSON for external plotting.

mod commands;
mod config;
mod output;
mod selftest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::fields::FieldError;
use crate::gates::GateError;
use crate::machine::MachineError;
use crate::statedep::TransportError;

pub use config::{
    AxisSpec, Experiment, Format, PotentialMapConfig, ProtocolConfig, RampSpec, RunConfig, ScheduleConfig,
    TransportConfig, TrapScanConfig,
};
pub use output::write_atomic;
pub use selftest::{run_selftest, SelftestReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_PROTOCOL: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("protocol error: {0}")]
    Protocol(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NUMERICAL,
            Self::Protocol(_) => EXIT_PROTOCOL,
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        match e {
            FieldError::Domain(_) => Self::Config(e.to_string()),
            FieldError::Accuracy { .. } | FieldError::NotFound { .. } => Self::Numerical(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::InvalidRamp(_) => Self::Config(e.to_string()),
            TransportError::Degenerate { .. }
            | TransportError::Tracking { .. }
            | TransportError::NotOnMinimum { .. } => Self::Numerical(e.to_string()),
            TransportError::Geometry(_) | TransportError::Scheduling(_) => Self::Protocol(e.to_string()),
        }
    }
}

impl From<GateError> for CliError {
    fn from(e: GateError) -> Self {
        match e {
            GateError::Domain(_) => Self::Config(e.to_string()),
            GateError::NotUnitary { .. } => Self::Numerical(e.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<MachineError> for CliError {
    fn from(e: MachineError) -> Self {
        match e {
            MachineError::Protocol { .. }
            | MachineError::Validation(_)
            | MachineError::Geometry(_)
            | MachineError::NotSimultaneous { .. } => Self::Protocol(e.to_string()),
            MachineError::IndexOutOfRange { .. }
            | MachineError::RegisterSize(_)
            | MachineError::Unnormalized { .. } => Self::Config(e.to_string()),
            MachineError::NotProduct { .. } => Self::Numerical(e.to_string()),
            MachineError::Transport(t) => t.into(),
            MachineError::Field(f) => f.into(),
            MachineError::Gate(g) => g.into(),
            MachineError::Analysis(a) => a.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nffd", version, about = "Near-field Fresnel-diffraction trap and gate simulator")]
pub struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (overrides the config).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Trap minimum position and depth for each aperture radius.
    TrapScan,
    /// NFFD potential on an (r, z) grid.
    PotentialMap,
    /// Trajectories of both qubit components along a polarization ramp.
    Transport,
    /// Six-step collisional gate on an array.
    ProtocolRun,
    /// Batches of gate pairs that can run in parallel.
    Schedule,
    /// Invariant checks against independent references.
    Selftest,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Self::TrapScan => Experiment::TrapScan,
            Self::PotentialMap => Experiment::PotentialMap,
            Self::Transport => Experiment::Transport,
            Self::ProtocolRun => Experiment::ProtocolRun,
            Self::Schedule => Experiment::Schedule,
            Self::Selftest => Experiment::Selftest,
        }
    }
}

/// Settings after merging flags over the config file.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tol: f64,
    pub seed: u64,
}

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 20_240_101;

fn resolve(cli: &Cli) -> Result<Resolved, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(kind) = config.experiment {
        if kind != cli.command.experiment() {
            return Err(CliError::Config(format!(
                "config is for {kind:?} but {:?} was requested",
                cli.command
            )));
        }
    }
    let tol = cli.tol.or(config.tolerance).unwrap_or(DEFAULT_TOL);
    config::check_tol(tol)?;
    Ok(Resolved {
        out: cli.out.clone().or_else(|| config.output.clone()),
        format: cli.format.or(config.format).unwrap_or(Format::Csv),
        seed: cli.seed.or(config.seed).unwrap_or(DEFAULT_SEED),
        tol,
        config,
    })
}

/// Runs one command and returns its message for stdout.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let r = resolve(cli)?;
    match cli.command {
        Command::TrapScan => commands::trap_scan(&r),
        Command::PotentialMap => commands::potential_map(&r),
        Command::Transport => commands::transport(&r),
        Command::ProtocolRun => commands::protocol_run(&r),
        Command::Schedule => commands::schedule(&r),
        Command::Selftest => commands::selftest(&r),
    }
}

/// Parses `std::env::args`, runs, prints, and returns the exit status.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(msg) => {
            if !msg.is_empty() {
                println!("{msg}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
