use std::f64::consts::PI;

use fcl_dvr_core::analysis::{fit_fundamental, scenario_metrics, thd, trace_rms, MetricsConfig, DEFAULT_HARMONIC_CAP};
use fcl_dvr_core::scenario::presets;
use fcl_dvr_core::sim::{
    Channel, Event, FaultEvent, Harmonic, LogEntry, OperatingMode, SagEvent, Topology,
};
use fcl_dvr_core::{run_scenario, Error, Scenario, SimulationResult};

const PERIOD: f64 = 0.02;
const OMEGA: f64 = 2.0 * PI * 50.0;

fn run(sc: &Scenario) -> SimulationResult {
    run_scenario(sc).expect("simulation")
}

fn quiet(horizon: f64) -> Scenario {
    Scenario {
        horizon,
        ..presets::table2()
    }
}

fn bolted(start: f64, end: f64) -> Event {
    Event::Fault(FaultEvent {
        start,
        end,
        fault_resistance: 0.0,
    })
}

#[test]
fn sag_fault_preset_has_expected_rows() {
    let res = run(&presets::table2_sag_fault());
    assert_eq!(res.trace.len(), 40001);
    res.trace.validate().unwrap();
}

#[test]
fn runs_are_bit_identical() {
    let sc = presets::table2_sag_fault();
    assert_eq!(run(&sc).trace, run(&sc).trace);
}

#[test]
fn quiet_run_stays_normal_without_injection() {
    let res = run(&quiet(0.1));
    assert!(res.trace.mode.iter().all(|&m| m == OperatingMode::Normal));
    assert!(res.trace.u_comp.iter().all(|&u| u == 0.0));
    assert!(res.trace.switches_on.iter().all(|&s| s));
    assert!(res.log.mode_changes().next().is_none());
}

#[test]
fn settled_current_matches_rated() {
    let res = run(&quiet(0.2));
    let i = trace_rms(&res.trace, Channel::ILine, 0.2 - PERIOD, PERIOD).unwrap();
    assert!((i / 4.861 - 1.0).abs() < 5e-3, "rms {i}");
}

#[test]
fn source_power_balances_dissipation() {
    let sc = quiet(0.2);
    let res = run(&sc);
    let t = &res.trace;
    let k0 = t.index_at(0.2 - PERIOD);
    let k1 = t.index_at(0.2);
    let r_total = sc.grid.r_source_line + sc.grid.r_load;
    let (mut p_src, mut p_diss) = (0.0, 0.0);
    for k in k0..k1 {
        p_src += t.v_source[k] * t.i_line[k];
        p_diss += r_total * t.i_line[k] * t.i_line[k];
    }
    assert!((p_src / p_diss - 1.0).abs() < 0.01, "source {p_src} dissipated {p_diss}");
}

#[test]
fn line_current_is_continuous() {
    let res = run(&presets::table2_sag_fault());
    let t = &res.trace;
    // Bound on one step of di/dt: peak source plus injection over the
    // smallest loop inductance.
    let sc = presets::table2_sag_fault();
    let v_max = sc.grid.v_peak() + sc.transformer.turns_ratio * sc.switches.v_dc;
    let bound = 1.5 * v_max / (sc.grid.l_source_line + sc.transformer.l_leakage) * t.sample_period;
    let worst = t.i_line.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
    assert!(worst < bound, "largest step {worst} vs {bound}");
}

#[test]
fn limiting_mode_opens_switches_and_stops_injection() {
    let res = run(&presets::table2_sag_fault());
    let t = &res.trace;
    let mut seen = false;
    for k in 0..t.len() {
        if t.mode[k] == OperatingMode::FaultLimiting {
            seen = true;
            assert_eq!(t.u_comp[k], 0.0);
            assert!(!t.switches_on[k]);
        }
    }
    assert!(seen);
}

#[test]
fn fault_current_stays_under_envelope() {
    let sc = quiet(0.4).with_events(vec![bolted(0.25, 0.35)]);
    let res = run(&sc);
    let (t_trip, i_trip) = res
        .log
        .entries
        .iter()
        .find_map(|e| match *e {
            LogEntry::ModeChange { time, to: OperatingMode::FaultLimiting, i_after, .. } => Some((time, i_after)),
            _ => None,
        })
        .expect("limiter trips");
    let topo = Topology::new(OperatingMode::FaultLimiting, Some(0.0), &sc.grid, &sc.transformer);
    let (r, l) = (topo.total_r(), topo.total_l());
    let steady = sc.grid.v_peak() / r.hypot(OMEGA * l);
    let phi = (OMEGA * l).atan2(r);
    let offset = i_trip - steady * (OMEGA * t_trip - phi).sin();
    let bound = 1.04 * (steady + offset.abs()).max(i_trip.abs());
    let w = res.trace.window(Channel::ILine, 0.25, 0.1).unwrap();
    let worst = w.iter().map(|i| i.abs()).fold(0.0, f64::max);
    assert!(worst <= bound, "max {worst} vs bound {bound}");
}

#[test]
fn compensation_lowers_pcc_distortion() {
    let distorted = Event::Sag(SagEvent {
        start: 0.1,
        end: 0.2,
        depth: 0.3,
        harmonics: vec![
            Harmonic { order: 5, fraction: 0.08 },
            Harmonic { order: 7, fraction: 0.05 },
        ],
    });
    let sc = quiet(0.25).with_events(vec![distorted]);
    let mut off = sc.clone();
    off.controller.compensation_enabled = false;
    let measure = |sc: &Scenario| {
        let res = run(sc);
        let w = res.trace.window(Channel::VLoad, 0.16, 2.0 * PERIOD).unwrap().to_vec();
        thd(&w, res.trace.sample_period, 50.0, DEFAULT_HARMONIC_CAP).unwrap()
    };
    let with = measure(&sc);
    let without = measure(&off);
    assert!(with < without, "compensated {with} vs uncompensated {without}");
}

#[test]
fn metrics_of_sag_fault_run() {
    let sc = presets::table2_sag_fault();
    let res = run(&sc);
    let cfg = MetricsConfig::for_scenario(&sc).unwrap();
    let m = scenario_metrics(&res.trace, Some(&res.log), &cfg).unwrap();
    assert!((m.sag_depth - 0.28).abs() < 0.01, "{m:?}");
    assert!(m.compensation_error < 0.05, "{m:?}");
    let ratio = m.limiting_ratio.unwrap();
    assert!((ratio / 37.0 - 1.0).abs() < 0.05, "{m:?}");
    // Only the source resistance dissipates outside the load.
    let ideal = sc.grid.r_load / (sc.grid.r_load + sc.grid.r_source_line);
    assert!((m.efficiency.unwrap() - ideal).abs() < 1e-3, "{m:?}");
}

#[test]
fn metrics_of_quiet_run() {
    let sc = quiet(0.1);
    let res = run(&sc);
    let cfg = MetricsConfig::for_scenario(&sc).unwrap();
    let m = scenario_metrics(&res.trace, Some(&res.log), &cfg).unwrap();
    assert!(m.sag_depth.abs() < 1e-3);
    assert_eq!(m.compensation_error, 0.0);
    assert_eq!(m.limiting_ratio, None);
    assert_eq!(m.max_fault_current, None);
    assert_eq!(
        scenario_metrics(&res.trace, None, &cfg),
        Err(Error::MissingEventLog)
    );
}

#[test]
fn deep_sag_saturates_the_inverter() {
    let sc = quiet(0.2).with_events(vec![Event::Sag(SagEvent {
        start: 0.05,
        end: 0.15,
        depth: 0.8,
        harmonics: Vec::new(),
    })]);
    let res = run(&sc);
    assert!(res.log.entries.iter().any(|e| matches!(e, LogEntry::Saturation { .. })));
    let limit = sc.transformer.turns_ratio * sc.switches.v_dc;
    assert!(res.trace.u_comp.iter().all(|u| u.abs() <= limit * (1.0 + 1e-12)));
}

#[test]
fn table3_runs_with_filter() {
    let sc = Scenario {
        horizon: 0.2,
        ..presets::table3()
    };
    let res = run(&sc);
    let w = res.trace.window(Channel::ILine, 0.2 - PERIOD, PERIOD).unwrap();
    let fit = fit_fundamental(w, 0.2 - PERIOD, res.trace.sample_period, OMEGA).unwrap();
    let topo = Topology::new(OperatingMode::Normal, None, &sc.grid, &sc.transformer);
    let expected = sc.grid.v_peak() / topo.total_r().hypot(OMEGA * topo.total_l());
    assert!((fit.amplitude / expected - 1.0).abs() < 5e-3, "{} vs {expected}", fit.amplitude);
}

#[test]
fn invalid_scenarios_are_rejected_before_running() {
    let overlapping = quiet(0.4).with_events(vec![bolted(0.1, 0.2), bolted(0.15, 0.3)]);
    assert!(run_scenario(&overlapping).is_err());
    let mut coarse = quiet(0.1);
    coarse.dt = 0.01;
    assert!(run_scenario(&coarse).is_err());
}
