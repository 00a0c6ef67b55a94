//! Modeling, simulation and design toolkit for a single-phase series fault
//! current limiter with dynamic voltage restorer capability (FCL-DVR).
//!
//! * [`circuit`]: parameter sets, phasor impedances, closed-form currents
//!   and PCC voltages.
//! * [`sim`]: fixed-step transient simulation with mode switching.
//! * [`design`]: sizing of the magnetizing inductance, turns ratios, DC link
//!   and switch ratings.
//! * [`analysis`]: RMS, THD, loss model, scenario metrics and the topology
//!   comparison table.
//! * [`scenario`] and [`io`]: scenario files, presets, waveform CSV and
//!   reports.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod circuit;
pub mod design;
pub mod error;
pub mod io;
pub mod scenario;
pub mod sim;

pub use circuit::{GridParams, PhasorImpedance, SinusoidSolution, SwitchParams, TransformerParams};
pub use error::{Error, Result};
pub use scenario::Scenario;
pub use sim::{run_scenario, EventLog, OperatingMode, SimulationResult, WaveformTrace};
