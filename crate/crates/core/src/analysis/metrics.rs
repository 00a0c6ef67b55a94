//! Figures of merit of a simulated scenario.

use serde::{Deserialize, Serialize};

use super::signal::{fit_fundamental, sliding_rms};
use crate::circuit::{total_impedance, GridParams, TransformerParams};
use crate::error::{Error, Result};
use crate::scenario::Scenario;
use crate::sim::{EventKind, EventLog, Event, OperatingMode, Topology, WaveformTrace};

/// Reference values the metrics are measured against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    pub nominal_rms: f64,
    pub frequency: f64,
    /// Steady peak line current of the fault with the limiter bypassed,
    /// from a paired run or the closed form. Without it no limiting ratio
    /// is reported.
    pub unlimited_peak: Option<f64>,
}

impl MetricsConfig {
    /// Nominal values of `scenario`, with the unlimited peak of its first
    /// fault taken from the closed form.
    pub fn for_scenario(scenario: &Scenario) -> Result<Self> {
        let unlimited_peak = scenario
            .events
            .iter()
            .find_map(|e| match e {
                Event::Fault(f) => Some(f.fault_resistance),
                Event::Sag(_) => None,
            })
            .map(|rf| steady_fault_peak(OperatingMode::Normal, rf, &scenario.grid, &scenario.transformer))
            .transpose()?;
        Ok(MetricsConfig {
            nominal_rms: scenario.grid.v_source_rms,
            frequency: scenario.grid.frequency,
            unlimited_peak,
        })
    }
}

/// Steady-state peak line current during a fault through `fault_resistance`
/// with the switches in `mode` (Normal: limiter bypassed; FaultLimiting:
/// magnetizing inductance in series).
pub fn steady_fault_peak(
    mode: OperatingMode,
    fault_resistance: f64,
    grid: &GridParams,
    xfmr: &TransformerParams,
) -> Result<f64> {
    let topo = Topology::new(mode, Some(fault_resistance), grid, xfmr);
    let z = total_impedance(topo.total_r(), topo.total_l(), grid.omega())?;
    Ok(grid.v_peak() / z.magnitude())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioMetrics {
    /// `1 - min(one-period source RMS) / nominal`.
    pub sag_depth: f64,
    /// Largest `|load RMS - nominal| / nominal` over half-period windows
    /// lying inside compensation intervals; 0 without compensation.
    pub compensation_error: f64,
    /// Unlimited peak over the limited steady amplitude.
    pub limiting_ratio: Option<f64>,
    /// Steady line-current amplitude at the end of the fault windows,
    /// from a sinusoid fit over the last period (the DC offset of a limited
    /// fault decays far slower than the fault lasts).
    pub fault_amplitude: Option<f64>,
    /// Largest `|i_line|` inside fault windows.
    pub max_fault_current: Option<f64>,
    /// Load power over source plus injected power, after the first period
    /// and outside fault windows and limiting intervals.
    pub efficiency: Option<f64>,
}

pub fn scenario_metrics(
    trace: &WaveformTrace,
    log: Option<&EventLog>,
    cfg: &MetricsConfig,
) -> Result<ScenarioMetrics> {
    let log = log.ok_or(Error::MissingEventLog)?;
    if !(cfg.nominal_rms > 0.0 && cfg.frequency > 0.0) {
        return Err(Error::invalid("metrics config", "nominal voltage and frequency must be > 0"));
    }
    let dt = trace.sample_period;
    let period = (1.0 / (cfg.frequency * dt)).round() as usize;
    let half = (period / 2).max(1);

    let source_rms = sliding_rms(&trace.v_source, period)?;
    let min_rms = source_rms.iter().copied().fold(f64::INFINITY, f64::min);
    let sag_depth = (1.0 - min_rms / cfg.nominal_rms).max(0.0);

    let mut compensation_error: f64 = 0.0;
    for (start, end) in log.mode_intervals(OperatingMode::Compensation) {
        let (i0, i1) = (trace.index_at(start), trace.index_at(end).min(trace.len()));
        if i1 < i0 + half {
            continue;
        }
        for r in sliding_rms(&trace.v_load[i0..i1], half)? {
            compensation_error = compensation_error.max((r - cfg.nominal_rms).abs() / cfg.nominal_rms);
        }
    }

    let fault_windows = log.event_windows(EventKind::Fault);
    let mut max_fault_current: Option<f64> = None;
    let mut fault_amplitude: Option<f64> = None;
    let omega = 2.0 * std::f64::consts::PI * cfg.frequency;
    for &(start, end) in &fault_windows {
        let (i0, i1) = (trace.index_at(start), trace.index_at(end).min(trace.len()));
        if i1 <= i0 {
            continue;
        }
        let peak = trace.i_line[i0..i1].iter().fold(0.0f64, |m, x| m.max(x.abs()));
        max_fault_current = Some(max_fault_current.map_or(peak, |m| m.max(peak)));
        if i1 - i0 >= period {
            let f0 = i1 - period;
            let fit = fit_fundamental(&trace.i_line[f0..i1], trace.time[f0], dt, omega)?;
            fault_amplitude = Some(fault_amplitude.map_or(fit.amplitude, |m| m.max(fit.amplitude)));
        }
    }
    let limiting_ratio = match (cfg.unlimited_peak, fault_amplitude) {
        (Some(u), Some(l)) if l > 0.0 => Some(u / l),
        _ => None,
    };

    // Energy parked in the magnetizing branch while limiting returns to the
    // load afterwards without passing a measured terminal, so limiting
    // intervals and one settling period after them are left out too.
    let settle = period as f64 * dt;
    let excluded: Vec<(f64, f64)> = fault_windows
        .iter()
        .chain(&log.mode_intervals(OperatingMode::FaultLimiting))
        .map(|&(s, e)| (s, e + settle))
        .collect();
    let (mut p_in, mut p_out) = (0.0, 0.0);
    for k in period..trace.len() {
        let t = trace.time[k];
        if excluded.iter().any(|&(s, e)| t >= s && t < e) {
            continue;
        }
        // The injected voltage draws its power from the DC link.
        p_in += (trace.v_source[k] + trace.u_comp[k]) * trace.i_line[k];
        p_out += trace.v_load[k] * trace.i_line[k];
    }
    let efficiency = (p_in > 0.0).then(|| p_out / p_in);

    Ok(ScenarioMetrics {
        sag_depth,
        compensation_error,
        limiting_ratio,
        fault_amplitude,
        max_fault_current,
        efficiency,
    })
}
