//! Scenario definitions, presets and the text format they are stored in.
//!
//! ```text
//! preset = table2
//! horizon = 400 ms
//! dt = 10 us
//!
//! [event]
//! kind = sag
//! start = 100 ms
//! end = 200 ms
//! depth = 0.28
//!
//! [event]
//! kind = fault
//! start = 250 ms
//! end = 350 ms
//! resistance = 0 ohm
//! ```

pub(crate) mod format;
mod parse;
pub mod presets;
pub mod units;

use serde::{Deserialize, Serialize};

pub use parse::{parse_scenario, serialize_scenario};

use crate::circuit::{GridParams, SwitchParams, TransformerParams};
use crate::error::{Error, Result};
use crate::sim::{check_step_size, validate_events, ControllerConfig, Event};

/// Everything a simulation run needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Preset the scenario was built from, if any.
    pub preset: Option<String>,
    pub grid: GridParams,
    pub transformer: TransformerParams,
    pub switches: SwitchParams,
    pub controller: ControllerConfig,
    /// Sorted by start, non-overlapping.
    pub events: Vec<Event>,
    pub horizon: f64,
    pub dt: f64,
    /// Rated load apparent power; derived from the load impedance when
    /// absent.
    pub load_va: Option<f64>,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.transformer.validate()?;
        self.switches.validate()?;
        self.controller.validate()?;
        validate_events(&self.events)?;
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::invalid("scenario", "horizon must be > 0"));
        }
        if let Some(last) = self.events.iter().map(Event::end).reduce(f64::max) {
            if last > self.horizon {
                return Err(Error::invalid(
                    "scenario",
                    format!("horizon {} s ends before the last event ({last} s)", self.horizon),
                ));
            }
        }
        if let Some(va) = self.load_va {
            if !(va > 0.0 && va.is_finite()) {
                return Err(Error::invalid("scenario", "load_va must be > 0"));
            }
        }
        check_step_size(self.dt, &self.grid, &self.transformer)
    }

    /// Explicit `load_va`, or `V^2 / |Z_load|`.
    pub fn rated_load_va(&self) -> f64 {
        self.load_va.unwrap_or_else(|| {
            let z = self.grid.load_impedance().magnitude();
            self.grid.v_source_rms.powi(2) / z
        })
    }

    /// Sorts events by start time (stable).
    pub fn sort_events(&mut self) {
        self.events.sort_by(|a, b| a.start().total_cmp(&b.start()));
    }

    pub fn with_events(mut self, events: Vec<Event>) -> Self {
        self.events = events;
        self.sort_events();
        self
    }
}
