//! Built-in parameter sets.
//!
//! `table2` is the full-scale simulation network (220 V, 50 Hz, 45 ohm +
//! 10 mH load, 1:5 injection transformer with 80 mH magnetizing and 1.7 mH
//! leakage inductance, 40 V DC link). `table3` is the scaled-down bench
//! setup (63 V, 1 mH load, 20 uF filter, 10 V DC link).

use super::Scenario;
use crate::circuit::{GridParams, SwitchParams, TransformerParams};
use crate::error::{Error, Result};
use crate::sim::{ControllerConfig, Event, FaultEvent, SagEvent};

pub const NAMES: [&str; 3] = ["table2", "table3", "table2-sag-fault"];

const HORIZON: f64 = 0.4;
const DT: f64 = 10e-6;
// Device ratings are not part of either parameter table.
const V_CES: f64 = 1200.0;
const V_ON_DROP: f64 = 2.0;

pub fn table2() -> Scenario {
    let grid = GridParams {
        v_source_rms: 220.0,
        frequency: 50.0,
        r_source_line: 0.1,
        l_source_line: 0.5e-3,
        r_load: 45.0,
        l_load: 0.01,
    };
    Scenario {
        preset: Some("table2".into()),
        grid,
        transformer: TransformerParams {
            turns_ratio: 5.0,
            l_magnetizing: 0.08,
            l_leakage: 0.0017,
            r_primary: 0.0,
            r_secondary_referred: 0.0,
            p_core: 0.0,
            c_filter: 0.0,
        },
        switches: SwitchParams {
            v_ces: V_CES,
            v_on_drop: V_ON_DROP,
            v_dc: 40.0,
        },
        controller: ControllerConfig::for_frequency(grid.frequency),
        events: Vec::new(),
        horizon: HORIZON,
        dt: DT,
        load_va: None,
    }
}

/// Bench-scale set. Source impedance is not listed for it, so the
/// full-scale source impedance is reused.
pub fn table3() -> Scenario {
    let base = table2();
    let grid = GridParams {
        v_source_rms: 63.0,
        l_load: 0.001,
        ..base.grid
    };
    Scenario {
        preset: Some("table3".into()),
        grid,
        transformer: TransformerParams {
            c_filter: 20e-6,
            ..base.transformer
        },
        switches: SwitchParams {
            v_dc: 10.0,
            ..base.switches
        },
        ..base
    }
}

/// `table2` with a 28 % sag over 100-200 ms and a bolted PCC fault over
/// 250-350 ms.
pub fn table2_sag_fault() -> Scenario {
    Scenario {
        preset: Some("table2-sag-fault".into()),
        ..table2()
    }
    .with_events(vec![
        Event::Sag(SagEvent {
            start: 0.1,
            end: 0.2,
            depth: 0.28,
            harmonics: Vec::new(),
        }),
        Event::Fault(FaultEvent {
            start: 0.25,
            end: 0.35,
            fault_resistance: 0.0,
        }),
    ])
}

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "table2" => Some(table2()),
        "table3" => Some(table3()),
        "table2-sag-fault" => Some(table2_sag_fault()),
        _ => None,
    }
}

/// Validates every preset; run once at start-up.
pub fn self_test() -> Result<()> {
    for name in NAMES {
        let sc = by_name(name).ok_or_else(|| Error::invalid("preset", format!("{name} missing")))?;
        sc.validate()
            .map_err(|e| Error::invalid("preset", format!("{name}: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        self_test().unwrap();
    }

    #[test]
    fn table3_load_va_is_derived() {
        let sc = table3();
        let z = (45.0f64.powi(2) + (2.0 * std::f64::consts::PI * 50.0 * 0.001).powi(2)).sqrt();
        assert!((sc.rated_load_va() - 63.0 * 63.0 / z).abs() < 1e-9);
    }
}
