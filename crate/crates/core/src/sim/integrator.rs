//! Trapezoidal integration of the switched series network.
//!
//! The network is a single loop: source EMF, source/line impedance, the
//! series transformer and the PCC shunt (load, or load in parallel with a
//! fault resistance). States are the line current and the primary-referred
//! voltage of the secondary filter capacitor, which is the injected voltage.

use serde::{Deserialize, Serialize};

use super::controller::compensation_reference;
use super::events::{active_fault, nominal_voltage, source_voltage, Event};
use super::OperatingMode;
use crate::circuit::{GridParams, SwitchParams, TransformerParams};
use crate::error::{Error, Result};

/// Minimum number of steps per fundamental period.
pub const MIN_STEPS_PER_PERIOD: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub time: f64,
    pub i_line: f64,
    /// Filter capacitor voltage referred to the primary.
    pub v_cap: f64,
    pub mode: OperatingMode,
    /// S1/S2 conducting.
    pub switches_on: bool,
    /// Injected series voltage on the primary.
    pub u_comp: f64,
    /// The last compensation command hit the DC-link clamp.
    pub saturated: bool,
}

impl SimState {
    pub fn initial() -> Self {
        SimState {
            time: 0.0,
            i_line: 0.0,
            v_cap: 0.0,
            mode: OperatingMode::Normal,
            switches_on: true,
            u_comp: 0.0,
            saturated: false,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite() && self.i_line.is_finite() && self.v_cap.is_finite() && self.u_comp.is_finite()
    }
}

/// Lumped loop parameters for one mode and fault condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Topology {
    pub r_series: f64,
    pub l_series: f64,
    /// Resistance between the PCC and return.
    pub r_shunt: f64,
    /// Inductance between the PCC and return (the load inductance when no
    /// fault is present).
    pub l_shunt: f64,
}

impl Topology {
    pub fn new(
        mode: OperatingMode,
        fault_resistance: Option<f64>,
        grid: &GridParams,
        xfmr: &TransformerParams,
    ) -> Self {
        let switches_on = mode != OperatingMode::FaultLimiting;
        let mut r_series = grid.r_source_line + xfmr.r_primary;
        let mut l_series = grid.l_source_line + xfmr.l_leakage;
        if switches_on {
            // Secondary current flows through the switch pair.
            r_series += xfmr.r_secondary_referred;
        } else {
            l_series += xfmr.l_magnetizing;
        }
        let (r_shunt, l_shunt) = match fault_resistance {
            None => (grid.r_load, grid.l_load),
            // The load inductance is dropped while faulted; the load
            // resistance stays in parallel with the fault.
            Some(rf) => {
                let r = if rf == 0.0 || grid.r_load == 0.0 {
                    0.0
                } else {
                    grid.r_load * rf / (grid.r_load + rf)
                };
                (r, 0.0)
            }
        };
        Topology {
            r_series,
            l_series,
            r_shunt,
            l_shunt,
        }
    }

    pub fn total_r(&self) -> f64 {
        self.r_series + self.r_shunt
    }

    pub fn total_l(&self) -> f64 {
        self.l_series + self.l_shunt
    }

    /// `di/dt` from the loop equation.
    pub fn di_dt(&self, v_source: f64, u_comp: f64, i_line: f64) -> f64 {
        (v_source + u_comp - self.total_r() * i_line) / self.total_l()
    }

    /// Voltage across the PCC shunt.
    pub fn v_pcc(&self, v_source: f64, u_comp: f64, i_line: f64) -> f64 {
        self.r_shunt * i_line + self.l_shunt * self.di_dt(v_source, u_comp, i_line)
    }
}

/// Filter time constant `R_T2' * C_1 / a^2`; zero makes the capacitor
/// voltage follow the inverter command directly.
pub fn filter_time_constant(xfmr: &TransformerParams) -> f64 {
    xfmr.r_secondary_referred * xfmr.c_filter_referred()
}

pub fn check_step_size(dt: f64, grid: &GridParams, xfmr: &TransformerParams) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::StepSize {
            dt,
            reason: "must be finite and > 0".into(),
        });
    }
    let limit = 1.0 / (MIN_STEPS_PER_PERIOD * grid.frequency);
    // Allow for the rounding in 1/(200 f) itself.
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::StepSize {
            dt,
            reason: format!("must not exceed 1/(200 f) = {limit} s"),
        });
    }
    let tau = filter_time_constant(xfmr);
    if tau > 0.0 && dt > 2.0 * tau {
        return Err(Error::StepSize {
            dt,
            reason: format!("filter time constant {tau} s needs dt <= {} s", 2.0 * tau),
        });
    }
    if grid.l_source_line + xfmr.l_leakage <= 0.0 {
        return Err(Error::invalid(
            "network",
            "source and leakage inductance must not both be zero",
        ));
    }
    Ok(())
}

/// Injection target at `t` for the given mode, with its saturation flag.
pub fn injection_target(
    mode: OperatingMode,
    t: f64,
    grid: &GridParams,
    xfmr: &TransformerParams,
    switches: &SwitchParams,
    events: &[Event],
) -> (f64, bool) {
    match mode {
        OperatingMode::Compensation => {
            let cmd = compensation_reference(
                source_voltage(t, grid, events),
                nominal_voltage(t, grid),
                xfmr,
                switches,
            );
            (cmd.primary, cmd.saturated)
        }
        _ => (0.0, false),
    }
}

/// Fault in effect over the step starting at `t` (sampled at mid-step).
pub fn step_fault(t: f64, dt: f64, events: &[Event]) -> Option<f64> {
    active_fault(t + 0.5 * dt, events).map(|f| f.fault_resistance)
}

/// Advances the network by one trapezoidal step in `state.mode`.
pub fn step(
    state: &SimState,
    grid: &GridParams,
    xfmr: &TransformerParams,
    switches: &SwitchParams,
    events: &[Event],
    dt: f64,
) -> Result<SimState> {
    check_step_size(dt, grid, xfmr)?;
    let t0 = state.time;
    let t1 = t0 + dt;
    let topo = Topology::new(state.mode, step_fault(t0, dt, events), grid, xfmr);
    let vs0 = source_voltage(t0, grid, events);
    let vs1 = source_voltage(t1, grid, events);

    let (target1, saturated) = injection_target(state.mode, t1, grid, xfmr, switches, events);
    let tau = filter_time_constant(xfmr);
    let (v_cap1, u0, u1) = match state.mode {
        OperatingMode::Compensation if tau > 0.0 => {
            let (target0, _) = injection_target(state.mode, t0, grid, xfmr, switches, events);
            let k = dt / (2.0 * tau);
            let v1 = ((1.0 - k) * state.v_cap + k * (target0 + target1)) / (1.0 + k);
            (v1, state.v_cap, v1)
        }
        OperatingMode::Compensation => (target1, state.u_comp, target1),
        // Closed switches short the capacitor; open switches leave no
        // injection path in this model.
        _ => (0.0, 0.0, 0.0),
    };

    let (r, l) = (topo.total_r(), topo.total_l());
    let h = 0.5 * dt / l;
    let i1 = ((1.0 - h * r) * state.i_line + h * (vs0 + u0 + vs1 + u1)) / (1.0 + h * r);

    let next = SimState {
        time: t1,
        i_line: i1,
        v_cap: v_cap1,
        mode: state.mode,
        switches_on: state.mode != OperatingMode::FaultLimiting,
        u_comp: u1,
        saturated,
    };
    if !next.is_finite() {
        return Err(Error::NonFinite { time: t1 });
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn null_system_stays_at_rest() {
        let sc = presets::table2();
        let grid = GridParams {
            v_source_rms: 0.0,
            ..sc.grid
        };
        let mut s = SimState::initial();
        for _ in 0..1000 {
            s = step(&s, &grid, &sc.transformer, &sc.switches, &[], 1e-5).unwrap();
            assert_eq!(s.i_line, 0.0);
            assert_eq!(s.v_cap, 0.0);
        }
    }

    #[test]
    fn step_size_limits() {
        let sc = presets::table2();
        let s = SimState::initial();
        assert!(step(&s, &sc.grid, &sc.transformer, &sc.switches, &[], 0.0).is_err());
        assert!(step(&s, &sc.grid, &sc.transformer, &sc.switches, &[], 1e-4).is_ok());
        assert!(matches!(
            step(&s, &sc.grid, &sc.transformer, &sc.switches, &[], 1.01e-4),
            Err(Error::StepSize { .. })
        ));
        // A stiff filter demands a smaller step.
        let stiff = TransformerParams {
            r_secondary_referred: 0.05,
            c_filter: 20e-6,
            ..sc.transformer
        };
        assert!(step(&s, &sc.grid, &stiff, &sc.switches, &[], 1e-5).is_err());
    }

    #[test]
    fn non_finite_state_aborts() {
        let sc = presets::table2();
        let s = SimState {
            i_line: f64::NAN,
            ..SimState::initial()
        };
        assert_eq!(
            step(&s, &sc.grid, &sc.transformer, &sc.switches, &[], 1e-5),
            Err(Error::NonFinite { time: 1e-5 })
        );
    }

    #[test]
    fn topology_inductances() {
        let sc = presets::table2();
        let (g, x) = (&sc.grid, &sc.transformer);
        let normal = Topology::new(OperatingMode::Normal, None, g, x);
        assert!((normal.total_l() - 12.2e-3).abs() < 1e-15);
        assert!((normal.total_r() - 45.1).abs() < 1e-12);
        let bolted_on = Topology::new(OperatingMode::Normal, Some(0.0), g, x);
        assert!((bolted_on.total_l() - 2.2e-3).abs() < 1e-15);
        assert_eq!(bolted_on.r_shunt, 0.0);
        let bolted_limited = Topology::new(OperatingMode::FaultLimiting, Some(0.0), g, x);
        assert!((bolted_limited.total_l() - 82.2e-3).abs() < 1e-15);
        let resistive = Topology::new(OperatingMode::Normal, Some(45.0), g, x);
        assert!((resistive.r_shunt - 22.5).abs() < 1e-12);
    }

    #[test]
    fn filter_lag_tracks_target() {
        let sc = presets::table2();
        let x = TransformerParams {
            r_secondary_referred: 0.5,
            c_filter: 25.0 * 40e-6,
            ..sc.transformer
        };
        assert!((filter_time_constant(&x) - 20e-6).abs() < 1e-18);
        let events = [Event::Sag(crate::sim::SagEvent {
            start: 0.0,
            end: 1.0,
            depth: 0.28,
            harmonics: vec![],
        })];
        let mut s = SimState {
            mode: OperatingMode::Compensation,
            ..SimState::initial()
        };
        let dt = 1e-6;
        for _ in 0..5000 {
            s = step(&s, &sc.grid, &x, &sc.switches, &events, dt).unwrap();
        }
        let (target, _) = injection_target(OperatingMode::Compensation, s.time, &sc.grid, &x, &sc.switches, &events);
        // Lag of a 20 us filter at 50 Hz is about omega tau of the peak.
        assert!((s.v_cap - target).abs() < 0.01 * 87.2);
    }
}
