use super::controller::{Controller, RatedValues};
use super::events::source_voltage;
use super::integrator::{filter_time_constant, injection_target, step, step_fault, SimState, Topology};
use super::trace::{scenario_entries, EventLog, LogEntry, TraceRow, WaveformTrace};
use super::OperatingMode;
use crate::circuit::normal_mode_solution;
use crate::error::Result;
use crate::scenario::Scenario;

/// Output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub trace: WaveformTrace,
    pub log: EventLog,
    pub rated: RatedValues,
}

/// Nominal voltage and rated peak current (the closed-form normal-mode
/// amplitude) of a scenario.
pub fn rated_values(scenario: &Scenario) -> Result<RatedValues> {
    let sol = normal_mode_solution(&scenario.grid, &scenario.transformer)?;
    Ok(RatedValues {
        voltage_rms: scenario.grid.v_source_rms,
        peak_current: sol.amplitude,
    })
}

/// Simulates the scenario from rest over `[0, horizon]`, one trace row per
/// step including `t = 0`.
pub fn run_scenario(scenario: &Scenario) -> Result<SimulationResult> {
    scenario.validate()?;
    let Scenario {
        grid,
        transformer: xfmr,
        switches,
        controller: cfg,
        events,
        horizon,
        dt,
        ..
    } = scenario;
    let dt = *dt;
    let steps = (horizon / dt).round() as usize;
    let rated = rated_values(scenario)?;
    let mut controller = Controller::new(*cfg, rated, dt);
    let tau = filter_time_constant(xfmr);

    let mut trace = WaveformTrace::with_capacity(dt, steps + 1);
    let mut log = EventLog {
        entries: scenario_entries(events),
        horizon: steps as f64 * dt,
    };

    let row_for = |state: &SimState, fault: Option<f64>| -> TraceRow {
        let topo = Topology::new(state.mode, fault, grid, xfmr);
        let v_source = source_voltage(state.time, grid, events);
        let v_pcc = topo.v_pcc(v_source, state.u_comp, state.i_line);
        TraceRow {
            time: state.time,
            v_source,
            v_pcc,
            v_load: v_pcc,
            i_line: state.i_line,
            u_comp: state.u_comp,
            mode: state.mode,
            switches_on: state.switches_on,
        }
    };

    let mut state = SimState::initial();
    trace.push(row_for(&state, step_fault(0.0, dt, events)));
    let mut saturation_logged = false;

    for n in 0..steps {
        let fault = step_fault(n as f64 * dt, dt, events);
        let mut next = step(&state, grid, xfmr, switches, events, dt)?;
        // Exact sample instants, free of accumulated rounding.
        next.time = (n + 1) as f64 * dt;

        let measured = row_for(&next, fault);
        let decision = controller.update(&next, measured.v_pcc - measured.u_comp);
        if decision != next.mode {
            let i_before = next.i_line;
            enter_mode(&mut next, decision, tau, |t| {
                injection_target(decision, t, grid, xfmr, switches, events)
            });
            log.entries.push(LogEntry::ModeChange {
                time: next.time,
                from: state.mode,
                to: decision,
                i_before,
                i_after: next.i_line,
            });
            saturation_logged = false;
        }
        if next.saturated && !saturation_logged {
            log.entries.push(LogEntry::Saturation { time: next.time });
            saturation_logged = true;
        }
        trace.push(row_for(&next, fault));
        state = next;
    }
    log.sort();
    Ok(SimulationResult { trace, log, rated })
}

/// Applies a mode change to the state at its current instant. The line
/// current is never touched.
fn enter_mode(
    state: &mut SimState,
    mode: OperatingMode,
    tau: f64,
    target: impl Fn(f64) -> (f64, bool),
) {
    state.mode = mode;
    state.switches_on = mode != OperatingMode::FaultLimiting;
    match mode {
        OperatingMode::Compensation if tau == 0.0 => {
            let (u, saturated) = target(state.time);
            state.v_cap = u;
            state.u_comp = u;
            state.saturated = saturated;
        }
        OperatingMode::Compensation => {
            state.u_comp = state.v_cap;
        }
        _ => {
            state.v_cap = 0.0;
            state.u_comp = 0.0;
            state.saturated = false;
        }
    }
}
