//! Time-domain simulation of the FCL-DVR across its three operating modes.
//!
//! * Normal: S1/S2 conduct, the secondary is shorted, nothing is injected.
//! * Compensation: S1/S2 act as an averaged inverter and inject the sag
//!   deficit through the series transformer.
//! * FaultLimiting: S1/S2 are off and the line current flows through the
//!   magnetizing inductance.

mod controller;
mod events;
mod integrator;
mod run;
mod trace;

use serde::{Deserialize, Serialize};

pub use controller::{
    compensation_reference, detect_mode, CompensationCommand, Controller, ControllerConfig, RatedValues,
    RollingRms,
};
pub use events::{
    active_fault, nominal_voltage, source_voltage, validate_events, Event, EventKind, FaultEvent, Harmonic,
    SagEvent,
};
pub use integrator::{
    check_step_size, filter_time_constant, step, SimState, Topology, MIN_STEPS_PER_PERIOD,
};
pub use run::{rated_values, run_scenario, SimulationResult};
pub use trace::{Channel, EventLog, LogEntry, TraceRow, WaveformTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatingMode {
    Normal,
    Compensation,
    FaultLimiting,
}

impl OperatingMode {
    /// Single-letter code used in trace files.
    pub fn code(self) -> char {
        match self {
            OperatingMode::Normal => 'N',
            OperatingMode::Compensation => 'C',
            OperatingMode::FaultLimiting => 'F',
        }
    }

    pub fn from_code(c: char) -> Option<Self> {
        match c {
            'N' => Some(OperatingMode::Normal),
            'C' => Some(OperatingMode::Compensation),
            'F' => Some(OperatingMode::FaultLimiting),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatingMode::Normal => "normal",
            OperatingMode::Compensation => "compensation",
            OperatingMode::FaultLimiting => "fault-limiting",
        }
    }
}

impl std::fmt::Display for OperatingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}
