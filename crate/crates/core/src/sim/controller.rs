//! Mode selection and the compensation voltage reference.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{OperatingMode, SimState};
use crate::circuit::{SwitchParams, TransformerParams};
use crate::error::{Error, Result};

/// Thresholds of the sag/fault detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Supply-side RMS (pu) below which compensation starts.
    pub sag_enter_pu: f64,
    /// RMS (pu) at or above which compensation stops.
    pub sag_exit_pu: f64,
    /// Instantaneous trip level as a multiple of rated peak current.
    pub overcurrent_multiple: f64,
    /// Re-arm level as a multiple of rated peak current. The switches close
    /// again once `|i_line|` has stayed at or below it for `rearm_hold`.
    pub rearm_multiple: f64,
    pub rearm_hold: f64,
    pub rms_window: f64,
    /// With `false` the switch pair never operates as an inverter.
    pub compensation_enabled: bool,
    /// With `false` the switches stay closed through a fault.
    pub limiter_enabled: bool,
}

impl ControllerConfig {
    /// Defaults for a network at `frequency`: enter at 0.90 pu, leave at
    /// 0.95 pu, trip at twice rated peak, re-arm after one period at rated
    /// peak, half-period RMS window.
    pub fn for_frequency(frequency: f64) -> Self {
        ControllerConfig {
            sag_enter_pu: 0.90,
            sag_exit_pu: 0.95,
            overcurrent_multiple: 2.0,
            rearm_multiple: 1.0,
            rearm_hold: 1.0 / frequency,
            rms_window: 0.5 / frequency,
            compensation_enabled: true,
            limiter_enabled: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let what = "controller config";
        if !(self.sag_enter_pu > 0.0 && self.sag_enter_pu < self.sag_exit_pu && self.sag_exit_pu <= 1.0) {
            return Err(Error::invalid(what, "need 0 < sag_enter_pu < sag_exit_pu <= 1"));
        }
        if !(self.overcurrent_multiple > 1.0 && self.overcurrent_multiple.is_finite()) {
            return Err(Error::invalid(what, "overcurrent_multiple must be > 1"));
        }
        if !(self.rearm_multiple > 0.0 && self.rearm_multiple < self.overcurrent_multiple) {
            return Err(Error::invalid(what, "need 0 < rearm_multiple < overcurrent_multiple"));
        }
        if !(self.rearm_hold >= 0.0 && self.rearm_hold.is_finite()) {
            return Err(Error::invalid(what, "rearm_hold must be >= 0"));
        }
        if !(self.rms_window > 0.0 && self.rms_window.is_finite()) {
            return Err(Error::invalid(what, "rms_window must be > 0"));
        }
        Ok(())
    }
}

/// Nominal quantities the detector compares against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatedValues {
    pub voltage_rms: f64,
    pub peak_current: f64,
}

/// Picks the operating mode for the next step.
///
/// Overcurrent wins over everything. A tripped limiter stays tripped until
/// the current has been at or below the re-arm level for `rearm_hold`
/// (`held_below` is how long it has been so far). The sag detector uses
/// hysteresis between `sag_enter_pu` and `sag_exit_pu`.
pub fn detect_mode(
    state: &SimState,
    v_rms: f64,
    held_below: f64,
    rated: &RatedValues,
    cfg: &ControllerConfig,
) -> OperatingMode {
    let trip = cfg.overcurrent_multiple * rated.peak_current;
    if cfg.limiter_enabled && state.i_line.abs() > trip {
        return OperatingMode::FaultLimiting;
    }
    if cfg.limiter_enabled && state.mode == OperatingMode::FaultLimiting && held_below < cfg.rearm_hold {
        return OperatingMode::FaultLimiting;
    }
    if !cfg.compensation_enabled {
        return OperatingMode::Normal;
    }
    let pu = v_rms / rated.voltage_rms;
    match state.mode {
        OperatingMode::Compensation if pu < cfg.sag_exit_pu => OperatingMode::Compensation,
        OperatingMode::Compensation => OperatingMode::Normal,
        _ if pu < cfg.sag_enter_pu => OperatingMode::Compensation,
        _ => OperatingMode::Normal,
    }
}

/// Inverter command for one instant of compensation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompensationCommand {
    /// Averaged inverter output, secondary side.
    pub secondary: f64,
    /// Injected series voltage on the primary, `a * secondary`.
    pub primary: f64,
    /// The request exceeded `+-v_dc` and was clipped.
    pub saturated: bool,
}

/// Secondary voltage that restores the nominal waveform:
/// `(nominal - actual) / a`, clipped to the DC-link voltage.
pub fn compensation_reference(
    v_source_instant: f64,
    nominal_instant: f64,
    xfmr: &TransformerParams,
    switches: &SwitchParams,
) -> CompensationCommand {
    let a = xfmr.turns_ratio;
    let wanted = (nominal_instant - v_source_instant) / a;
    let secondary = wanted.clamp(-switches.v_dc, switches.v_dc);
    CompensationCommand {
        secondary,
        primary: a * secondary,
        saturated: wanted.abs() > switches.v_dc,
    }
}

/// Sliding-window RMS over a fixed number of samples.
#[derive(Debug, Clone)]
pub struct RollingRms {
    squares: VecDeque<f64>,
    capacity: usize,
    sum: f64,
    since_refresh: usize,
}

impl RollingRms {
    pub fn new(capacity: usize) -> Self {
        let capacity = capacity.max(1);
        RollingRms {
            squares: VecDeque::with_capacity(capacity),
            capacity,
            sum: 0.0,
            since_refresh: 0,
        }
    }

    pub fn push(&mut self, x: f64) {
        let sq = x * x;
        if self.squares.len() == self.capacity {
            if let Some(old) = self.squares.pop_front() {
                self.sum -= old;
            }
        }
        self.squares.push_back(sq);
        self.sum += sq;
        self.since_refresh += 1;
        // Re-sum once per window so cancellation error cannot accumulate.
        if self.since_refresh >= self.capacity {
            self.sum = self.squares.iter().sum();
            self.since_refresh = 0;
        }
    }

    pub fn is_full(&self) -> bool {
        self.squares.len() == self.capacity
    }

    pub fn value(&self) -> f64 {
        if self.squares.is_empty() {
            0.0
        } else {
            (self.sum.max(0.0) / self.squares.len() as f64).sqrt()
        }
    }
}

/// Stateful wrapper used by the simulator: feeds the rolling RMS and the
/// re-arm timer, then defers to [`detect_mode`].
#[derive(Debug, Clone)]
pub struct Controller {
    cfg: ControllerConfig,
    rated: RatedValues,
    rms: RollingRms,
    below_since: Option<f64>,
}

impl Controller {
    pub fn new(cfg: ControllerConfig, rated: RatedValues, dt: f64) -> Self {
        let samples = (cfg.rms_window / dt).round() as usize;
        Controller {
            cfg,
            rated,
            rms: RollingRms::new(samples),
            below_since: None,
        }
    }

    /// `v_supply` is the PCC voltage with the injected voltage removed.
    pub fn update(&mut self, state: &SimState, v_supply: f64) -> OperatingMode {
        self.rms.push(v_supply);
        let rearm_level = self.cfg.rearm_multiple * self.rated.peak_current;
        if state.i_line.abs() <= rearm_level {
            self.below_since.get_or_insert(state.time);
        } else {
            self.below_since = None;
        }
        let held_below = self.below_since.map_or(0.0, |t0| state.time - t0);
        // Until the window fills the voltage is taken as healthy.
        let v_rms = if self.rms.is_full() {
            self.rms.value()
        } else {
            self.rated.voltage_rms
        };
        detect_mode(state, v_rms, held_below, &self.rated, &self.cfg)
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.cfg
    }

    pub fn rated(&self) -> &RatedValues {
        &self.rated
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;
    use std::f64::consts::SQRT_2;

    fn rated() -> RatedValues {
        RatedValues {
            voltage_rms: 220.0,
            peak_current: 6.874,
        }
    }

    fn state(i: f64, mode: OperatingMode) -> SimState {
        SimState {
            i_line: i,
            mode,
            switches_on: mode != OperatingMode::FaultLimiting,
            ..SimState::initial()
        }
    }

    #[test]
    fn overcurrent_dominates() {
        let cfg = ControllerConfig::for_frequency(50.0);
        for v in [0.0, 150.0, 220.0, 300.0] {
            let s = state(3.0 * 6.874, OperatingMode::Normal);
            assert_eq!(detect_mode(&s, v, 0.0, &rated(), &cfg), OperatingMode::FaultLimiting);
        }
    }

    #[test]
    fn sag_enters_compensation() {
        let cfg = ControllerConfig::for_frequency(50.0);
        let s = state(6.0, OperatingMode::Normal);
        assert_eq!(detect_mode(&s, 0.72 * 220.0, 0.0, &rated(), &cfg), OperatingMode::Compensation);
        assert_eq!(detect_mode(&s, 220.0, 0.0, &rated(), &cfg), OperatingMode::Normal);
    }

    #[test]
    fn hysteresis() {
        let cfg = ControllerConfig::for_frequency(50.0);
        let normal = state(1.0, OperatingMode::Normal);
        let comp = state(1.0, OperatingMode::Compensation);
        // Between thresholds the previous decision holds.
        assert_eq!(detect_mode(&normal, 0.92 * 220.0, 0.0, &rated(), &cfg), OperatingMode::Normal);
        assert_eq!(detect_mode(&comp, 0.92 * 220.0, 0.0, &rated(), &cfg), OperatingMode::Compensation);
        assert_eq!(detect_mode(&comp, 0.95 * 220.0, 0.0, &rated(), &cfg), OperatingMode::Normal);
    }

    #[test]
    fn limiter_holds_until_rearm() {
        let cfg = ControllerConfig::for_frequency(50.0);
        let s = state(5.0, OperatingMode::FaultLimiting);
        assert_eq!(detect_mode(&s, 220.0, 0.01, &rated(), &cfg), OperatingMode::FaultLimiting);
        assert_eq!(detect_mode(&s, 220.0, 0.02, &rated(), &cfg), OperatingMode::Normal);
        let disabled = ControllerConfig { limiter_enabled: false, ..cfg };
        let s = state(100.0, OperatingMode::Normal);
        assert_eq!(detect_mode(&s, 220.0, 0.0, &rated(), &disabled), OperatingMode::Normal);
    }

    #[test]
    fn compensation_reference_examples() {
        let sc = presets::table2();
        let vm = 220.0 * SQRT_2;
        // Peak of the 28 % deficit.
        let cmd = compensation_reference(0.72 * vm, vm, &sc.transformer, &sc.switches);
        assert!((cmd.primary - 87.1155554).abs() < 1e-6);
        assert!((cmd.secondary - 17.4231111).abs() < 1e-6);
        assert!(!cmd.saturated);

        let cmd = compensation_reference(vm, vm, &sc.transformer, &sc.switches);
        assert_eq!(cmd.secondary, 0.0);

        let cmd = compensation_reference(0.1 * vm, vm, &sc.transformer, &sc.switches);
        assert!((0.9 * vm / 5.0 - 56.0).abs() < 1e-2);
        assert_eq!(cmd.secondary, 40.0);
        assert!(cmd.saturated);
        let cmd = compensation_reference(-0.1 * vm, -vm, &sc.transformer, &sc.switches);
        assert_eq!(cmd.secondary, -40.0);
    }

    #[test]
    fn rolling_rms_of_sine() {
        let n = 1000;
        let mut r = RollingRms::new(n);
        for k in 0..5 * n {
            let x = 311.127 * (2.0 * std::f64::consts::PI * k as f64 / (2 * n) as f64).sin();
            r.push(x);
        }
        assert!(r.is_full());
        assert!((r.value() - 311.127 / SQRT_2).abs() < 1e-6);
    }

    #[test]
    fn config_validation() {
        let cfg = ControllerConfig::for_frequency(50.0);
        assert!(cfg.validate().is_ok());
        assert!(ControllerConfig { sag_enter_pu: 0.96, ..cfg }.validate().is_err());
        assert!(ControllerConfig { overcurrent_multiple: 1.0, ..cfg }.validate().is_err());
        assert!(ControllerConfig { rms_window: 0.0, ..cfg }.validate().is_err());
    }
}
