//! Reading and writing the scenario text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::format::{boolean, quantity, tokenize, Item};
use super::presets;
use super::units::{format_quantity, Dimension};
use super::Scenario;
use crate::circuit::{GridParams, SwitchParams, TransformerParams};
use crate::error::{Error, Result};
use crate::sim::{ControllerConfig, Event, FaultEvent, Harmonic, SagEvent};

use Dimension::*;

const TOP_LEVEL: &[(&str, Dimension)] = &[
    ("v_source", Voltage),
    ("frequency", Frequency),
    ("r_source", Resistance),
    ("l_source", Inductance),
    ("r_load", Resistance),
    ("l_load", Inductance),
    ("load_va", ApparentPower),
    ("turns_ratio", Dimensionless),
    ("l_magnetizing", Inductance),
    ("l_leakage", Inductance),
    ("r_primary", Resistance),
    ("r_secondary", Resistance),
    ("p_core", Power),
    ("c_filter", Capacitance),
    ("v_ces", Voltage),
    ("v_on", Voltage),
    ("v_dc", Voltage),
    ("sag_enter", Dimensionless),
    ("sag_exit", Dimensionless),
    ("overcurrent_multiple", Dimensionless),
    ("rearm_multiple", Dimensionless),
    ("rearm_hold", Time),
    ("rms_window", Time),
    ("horizon", Time),
    ("dt", Time),
];

// Keys whose value is not a quantity.
const TEXT_KEYS: &[&str] = &["preset", "events", "compensation", "limiter"];

struct Entries {
    values: BTreeMap<String, (String, usize)>,
}

impl Entries {
    fn insert(&mut self, key: String, value: String, line: usize) -> Result<()> {
        if let Some((_, first)) = self.values.get(&key) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{key}` (first set on line {first})"),
            });
        }
        self.values.insert(key, (value, line));
        Ok(())
    }

    fn quantity(&self, key: &str) -> Result<Option<f64>> {
        let dim = TOP_LEVEL
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, d)| *d)
            .expect("key listed in TOP_LEVEL");
        self.values
            .get(key)
            .map(|(v, line)| quantity(v, dim, *line))
            .transpose()
    }

    /// Explicit value, else the preset's, else a missing-key error.
    fn required(&self, key: &str, fallback: Option<f64>) -> Result<f64> {
        match self.quantity(key)? {
            Some(v) => Ok(v),
            None => fallback.ok_or_else(|| {
                Error::invalid("scenario", format!("missing `{key}` (no preset given)"))
            }),
        }
    }

    fn optional(&self, key: &str, fallback: f64) -> Result<f64> {
        Ok(self.quantity(key)?.unwrap_or(fallback))
    }

    fn flag(&self, key: &str, fallback: bool) -> Result<bool> {
        match self.values.get(key) {
            Some((v, line)) => boolean(v, *line),
            None => Ok(fallback),
        }
    }
}

#[derive(Default)]
struct EventBlock {
    line: usize,
    kind: Option<(String, usize)>,
    fields: BTreeMap<String, (String, usize)>,
    harmonics: Vec<(String, usize)>,
}

impl EventBlock {
    fn insert(&mut self, key: String, value: String, line: usize) -> Result<()> {
        match key.as_str() {
            "kind" if self.kind.is_none() => {
                self.kind = Some((value, line));
                return Ok(());
            }
            "harmonic" => {
                self.harmonics.push((value, line));
                return Ok(());
            }
            "kind" | "start" | "end" | "depth" | "resistance" => {}
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown event key `{key}`"),
                })
            }
        }
        if self.fields.contains_key(&key) || key == "kind" {
            return Err(Error::Parse {
                line,
                message: format!("duplicate event key `{key}`"),
            });
        }
        self.fields.insert(key, (value, line));
        Ok(())
    }

    fn get(&self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        self.fields
            .get(key)
            .map(|(v, line)| quantity(v, dim, *line))
            .transpose()
    }

    fn need(&self, key: &str, dim: Dimension) -> Result<f64> {
        self.get(key, dim)?.ok_or_else(|| Error::Parse {
            line: self.line,
            message: format!("event is missing `{key}`"),
        })
    }

    fn reject(&self, key: &str, kind: &str) -> Result<()> {
        match self.fields.get(key) {
            Some((_, line)) => Err(Error::Parse {
                line: *line,
                message: format!("`{key}` does not apply to a {kind} event"),
            }),
            None => Ok(()),
        }
    }

    fn build(self) -> Result<Event> {
        let (kind, kind_line) = self.kind.clone().ok_or_else(|| Error::Parse {
            line: self.line,
            message: "event is missing `kind`".into(),
        })?;
        let start = self.need("start", Time)?;
        let end = self.need("end", Time)?;
        match kind.as_str() {
            "sag" => {
                self.reject("resistance", "sag")?;
                let harmonics = self
                    .harmonics
                    .iter()
                    .map(|(v, line)| parse_harmonic(v, *line))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Event::Sag(SagEvent {
                    start,
                    end,
                    depth: self.need("depth", Dimensionless)?,
                    harmonics,
                }))
            }
            "fault" => {
                self.reject("depth", "fault")?;
                if let Some((_, line)) = self.harmonics.first() {
                    return Err(Error::Parse {
                        line: *line,
                        message: "`harmonic` does not apply to a fault event".into(),
                    });
                }
                Ok(Event::Fault(FaultEvent {
                    start,
                    end,
                    fault_resistance: self.get("resistance", Resistance)?.unwrap_or(0.0),
                }))
            }
            other => Err(Error::Parse {
                line: kind_line,
                message: format!("unknown event kind `{other}` (expected sag or fault)"),
            }),
        }
    }
}

fn parse_harmonic(value: &str, line: usize) -> Result<Harmonic> {
    let mut parts = value.split_whitespace();
    let (Some(order), Some(fraction), None) = (parts.next(), parts.next(), parts.next()) else {
        return Err(Error::Parse {
            line,
            message: format!("expected `harmonic = ORDER FRACTION`, found `{value}`"),
        });
    };
    let order: u32 = order.parse().map_err(|_| Error::Parse {
        line,
        message: format!("harmonic order `{order}` is not an integer"),
    })?;
    Ok(Harmonic {
        order,
        fraction: quantity(fraction, Dimensionless, line)?,
    })
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut top = Entries {
        values: BTreeMap::new(),
    };
    let mut blocks: Vec<EventBlock> = Vec::new();
    for item in tokenize(text)? {
        match item {
            Item::Section { name, arg, line } => {
                if name != "event" || arg.is_some() {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown section `[{name}]`"),
                    });
                }
                blocks.push(EventBlock {
                    line,
                    ..EventBlock::default()
                });
            }
            Item::Entry { key, value, line } => match blocks.last_mut() {
                Some(block) => block.insert(key, value, line)?,
                None => {
                    let known = TEXT_KEYS.contains(&key.as_str())
                        || TOP_LEVEL.iter().any(|(k, _)| *k == key);
                    if !known {
                        return Err(Error::Parse {
                            line,
                            message: format!("unknown key `{key}`"),
                        });
                    }
                    top.insert(key, value, line)?;
                }
            },
        }
    }

    let base = match top.values.get("preset") {
        Some((name, line)) => Some(presets::by_name(name).ok_or_else(|| Error::Parse {
            line: *line,
            message: format!("unknown preset `{name}` (known: {})", presets::NAMES.join(", ")),
        })?),
        None => None,
    };
    let b = base.as_ref();

    let grid = GridParams {
        v_source_rms: top.required("v_source", b.map(|s| s.grid.v_source_rms))?,
        frequency: top.required("frequency", b.map(|s| s.grid.frequency))?,
        r_source_line: top.required("r_source", b.map(|s| s.grid.r_source_line))?,
        l_source_line: top.required("l_source", b.map(|s| s.grid.l_source_line))?,
        r_load: top.required("r_load", b.map(|s| s.grid.r_load))?,
        l_load: top.required("l_load", b.map(|s| s.grid.l_load))?,
    };
    let transformer = TransformerParams {
        turns_ratio: top.required("turns_ratio", b.map(|s| s.transformer.turns_ratio))?,
        l_magnetizing: top.required("l_magnetizing", b.map(|s| s.transformer.l_magnetizing))?,
        l_leakage: top.required("l_leakage", b.map(|s| s.transformer.l_leakage))?,
        r_primary: top.optional("r_primary", b.map_or(0.0, |s| s.transformer.r_primary))?,
        r_secondary_referred: top.optional(
            "r_secondary",
            b.map_or(0.0, |s| s.transformer.r_secondary_referred),
        )?,
        p_core: top.optional("p_core", b.map_or(0.0, |s| s.transformer.p_core))?,
        c_filter: top.optional("c_filter", b.map_or(0.0, |s| s.transformer.c_filter))?,
    };
    let switches = SwitchParams {
        v_ces: top.required("v_ces", b.map(|s| s.switches.v_ces))?,
        v_on_drop: top.required("v_on", b.map(|s| s.switches.v_on_drop))?,
        v_dc: top.required("v_dc", b.map(|s| s.switches.v_dc))?,
    };
    // Window and hold times follow the (possibly overridden) frequency.
    let d = ControllerConfig::for_frequency(grid.frequency);
    let controller = ControllerConfig {
        sag_enter_pu: top.optional("sag_enter", d.sag_enter_pu)?,
        sag_exit_pu: top.optional("sag_exit", d.sag_exit_pu)?,
        overcurrent_multiple: top.optional("overcurrent_multiple", d.overcurrent_multiple)?,
        rearm_multiple: top.optional("rearm_multiple", d.rearm_multiple)?,
        rearm_hold: top.optional("rearm_hold", d.rearm_hold)?,
        rms_window: top.optional("rms_window", d.rms_window)?,
        compensation_enabled: top.flag("compensation", d.compensation_enabled)?,
        limiter_enabled: top.flag("limiter", d.limiter_enabled)?,
    };

    let clear = match top.values.get("events") {
        Some((v, line)) if v == "none" => {
            if let Some(block) = blocks.first() {
                return Err(Error::Parse {
                    line: block.line,
                    message: format!("`events = none` (line {line}) conflicts with [event] blocks"),
                });
            }
            true
        }
        Some((v, line)) => {
            return Err(Error::Parse {
                line: *line,
                message: format!("`events` only accepts `none`, found `{v}`"),
            })
        }
        None => false,
    };
    let events = if !blocks.is_empty() {
        blocks.into_iter().map(EventBlock::build).collect::<Result<Vec<_>>>()?
    } else if clear {
        Vec::new()
    } else {
        b.map(|s| s.events.clone()).unwrap_or_default()
    };

    let mut scenario = Scenario {
        preset: b.and_then(|s| s.preset.clone()),
        grid,
        transformer,
        switches,
        controller,
        events,
        horizon: top.required("horizon", b.map(|s| s.horizon))?,
        dt: top.required("dt", b.map(|s| s.dt))?,
        load_va: top.quantity("load_va")?.or(b.and_then(|s| s.load_va)),
    };
    scenario.sort_events();
    scenario.validate()?;
    Ok(scenario)
}

fn line(out: &mut String, key: &str, value: f64, dim: Dimension) {
    let _ = writeln!(out, "{key} = {}", format_quantity(value, dim));
}

fn on_off(v: bool) -> &'static str {
    if v {
        "on"
    } else {
        "off"
    }
}

/// Writes every field explicitly, so the output reparses to the same
/// scenario regardless of preset defaults.
pub fn serialize_scenario(scenario: &Scenario) -> String {
    let mut out = String::new();
    if let Some(p) = &scenario.preset {
        let _ = writeln!(out, "preset = {p}");
    }
    let g = &scenario.grid;
    let _ = writeln!(out, "\n# grid");
    line(&mut out, "v_source", g.v_source_rms, Voltage);
    line(&mut out, "frequency", g.frequency, Frequency);
    line(&mut out, "r_source", g.r_source_line, Resistance);
    line(&mut out, "l_source", g.l_source_line, Inductance);
    line(&mut out, "r_load", g.r_load, Resistance);
    line(&mut out, "l_load", g.l_load, Inductance);
    if let Some(va) = scenario.load_va {
        line(&mut out, "load_va", va, ApparentPower);
    }
    let t = &scenario.transformer;
    let _ = writeln!(out, "\n# series transformer");
    line(&mut out, "turns_ratio", t.turns_ratio, Dimensionless);
    line(&mut out, "l_magnetizing", t.l_magnetizing, Inductance);
    line(&mut out, "l_leakage", t.l_leakage, Inductance);
    line(&mut out, "r_primary", t.r_primary, Resistance);
    line(&mut out, "r_secondary", t.r_secondary_referred, Resistance);
    line(&mut out, "p_core", t.p_core, Power);
    line(&mut out, "c_filter", t.c_filter, Capacitance);
    let s = &scenario.switches;
    let _ = writeln!(out, "\n# switches");
    line(&mut out, "v_ces", s.v_ces, Voltage);
    line(&mut out, "v_on", s.v_on_drop, Voltage);
    line(&mut out, "v_dc", s.v_dc, Voltage);
    let c = &scenario.controller;
    let _ = writeln!(out, "\n# controller");
    line(&mut out, "sag_enter", c.sag_enter_pu, Dimensionless);
    line(&mut out, "sag_exit", c.sag_exit_pu, Dimensionless);
    line(&mut out, "overcurrent_multiple", c.overcurrent_multiple, Dimensionless);
    line(&mut out, "rearm_multiple", c.rearm_multiple, Dimensionless);
    line(&mut out, "rearm_hold", c.rearm_hold, Time);
    line(&mut out, "rms_window", c.rms_window, Time);
    let _ = writeln!(out, "compensation = {}", on_off(c.compensation_enabled));
    let _ = writeln!(out, "limiter = {}", on_off(c.limiter_enabled));
    let _ = writeln!(out, "\n# run");
    line(&mut out, "horizon", scenario.horizon, Time);
    line(&mut out, "dt", scenario.dt, Time);
    if scenario.events.is_empty() {
        let _ = writeln!(out, "events = none");
    }
    for event in &scenario.events {
        let _ = writeln!(out, "\n[event]\nkind = {}", event.kind().as_str());
        line(&mut out, "start", event.start(), Time);
        line(&mut out, "end", event.end(), Time);
        match event {
            Event::Sag(sag) => {
                line(&mut out, "depth", sag.depth, Dimensionless);
                for h in &sag.harmonics {
                    let _ = writeln!(out, "harmonic = {} {}", h.order, h.fraction);
                }
            }
            Event::Fault(f) => line(&mut out, "resistance", f.fault_resistance, Resistance),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_table2() {
        let sc = parse_scenario("preset = table2\n").unwrap();
        assert_eq!(sc, presets::table2());
        assert_eq!(sc.grid.l_source_line, 0.5e-3);
        assert_eq!(sc.transformer.l_magnetizing, 0.08);
        assert_eq!(sc.switches.v_dc, 40.0);
    }

    #[test]
    fn overrides_and_events() {
        let doc = "preset = table2\nv_dc = 30 V\nhorizon = 300 ms\n\n[event]\nkind = fault\nstart = 100 ms\nend = 150 ms\n\n[event]\nkind = sag\nstart = 20 ms\nend = 60 ms\ndepth = 0.3\nharmonic = 3 0.05\n";
        let sc = parse_scenario(doc).unwrap();
        assert_eq!(sc.switches.v_dc, 30.0);
        assert_eq!(sc.events.len(), 2);
        assert!(matches!(&sc.events[0], Event::Sag(s) if s.harmonics.len() == 1));
        assert!(matches!(&sc.events[1], Event::Fault(f) if f.fault_resistance == 0.0));
    }

    #[test]
    fn frequency_override_rescales_controller_defaults() {
        let sc = parse_scenario("preset = table2\nfrequency = 60 Hz\n").unwrap();
        assert!((sc.controller.rms_window - 0.5 / 60.0).abs() < 1e-15);
    }

    #[test]
    fn round_trip() {
        for sc in [presets::table2(), presets::table3(), presets::table2_sag_fault()] {
            let text = serialize_scenario(&sc);
            assert_eq!(parse_scenario(&text).unwrap(), sc, "{text}");
        }
    }

    #[test]
    fn events_none_clears_preset_events() {
        let sc = parse_scenario("preset = table2-sag-fault\nevents = none\n").unwrap();
        assert!(sc.events.is_empty());
        let again = parse_scenario(&serialize_scenario(&sc)).unwrap();
        assert_eq!(again, sc);
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(
            parse_scenario("preset = table2\nbogus = 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario("preset = table2\nv_dc = 1 V\nv_dc = 2 V\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_scenario("preset = table2\n[event]\nkind = sag\ncolour = red\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(parse_scenario("preset = nope\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn unit_errors_carry_line() {
        assert!(matches!(
            parse_scenario("preset = table2\nl_load = 10 mV\n"),
            Err(Error::Unit { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario("preset = table2\nhorizon = 0.4\n"),
            Err(Error::Unit { line: 2, .. })
        ));
    }

    #[test]
    fn overlapping_events_rejected() {
        let doc = "preset = table2\n[event]\nkind = sag\nstart = 0.1 s\nend = 0.2 s\ndepth = 0.2\n[event]\nkind = fault\nstart = 0.15 s\nend = 0.3 s\n";
        assert!(matches!(parse_scenario(doc), Err(Error::OverlappingEvents(_))));
    }

    #[test]
    fn missing_parameters_without_preset() {
        let err = parse_scenario("v_source = 220 V\n").unwrap_err();
        assert!(err.is_validation());
        assert!(err.to_string().contains("missing"));
    }
}
