//! Trap-array quantum computer: sites, the qubit register, the collisional
//! gate protocol and parallel scheduling.

mod array;
mod protocol;
mod register;
mod schedule;

use thiserror::Error;

use crate::analysis::AnalysisError;
use crate::fields::FieldError;
use crate::gates::GateError;
use crate::statedep::TransportError;

pub use array::{default_lattice, ArrayConfig, LatticeLine, LatticeRequirement, Layout, PairGeometry, Site, TrapArray};
pub use protocol::{
    adiabatic_check, adiabatic_check_with, plan_gate, run_simultaneous, run_two_qubit_gate, Adiabaticity,
    GatePlan, LegRecord, ProtocolSettings, ProtocolTrace, StepParams, StepRecord, ADIABATIC_THRESHOLD,
    MEETING_TOL, RETURN_TOL, TRACE_SCHEMA_VERSION,
};
pub use register::{Register, MAX_QUBITS};
pub use schedule::{conflicts, schedule_parallel};

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("protocol step {step} failed: {reason}")]
    Protocol { step: u8, reason: String },
    #[error("invalid gate pair: {0}")]
    Validation(String),
    #[error("invalid array geometry: {0}")]
    Geometry(String),
    #[error("pairs need {batches} batches and cannot run simultaneously")]
    NotSimultaneous { batches: usize },
    #[error("index {index} out of range (size {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("register size {0} outside 1..=20")]
    RegisterSize(usize),
    #[error("register state is not normalized (norm² = {norm_sqr})")]
    Unnormalized { norm_sqr: f64 },
    #[error("pair is entangled with the rest of the register (purity {purity})")]
    NotProduct { purity: f64 },
    #[error(transparent)]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

pub type Result<T> = std::result::Result<T, MachineError>;
