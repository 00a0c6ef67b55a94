use serde::{Deserialize, Serialize};

use crate::circuit::GridParams;
use crate::error::{Error, Result};

/// Extra source distortion applied while a sag is active, as a fraction of
/// the nominal peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub order: u32,
    pub fraction: f64,
}

/// Source amplitude reduced to `(1 - depth)` of nominal over `[start, end)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SagEvent {
    pub start: f64,
    pub end: f64,
    pub depth: f64,
    #[serde(default)]
    pub harmonics: Vec<Harmonic>,
}

/// Shunt fault at the PCC over `[start, end)`. Zero resistance is a bolted
/// fault.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub start: f64,
    pub end: f64,
    pub fault_resistance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    Sag,
    Fault,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Sag => "sag",
            EventKind::Fault => "fault",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Event {
    Sag(SagEvent),
    Fault(FaultEvent),
}

impl Event {
    pub fn start(&self) -> f64 {
        match self {
            Event::Sag(s) => s.start,
            Event::Fault(f) => f.start,
        }
    }

    pub fn end(&self) -> f64 {
        match self {
            Event::Sag(s) => s.end,
            Event::Fault(f) => f.end,
        }
    }

    pub fn kind(&self) -> EventKind {
        match self {
            Event::Sag(_) => EventKind::Sag,
            Event::Fault(_) => EventKind::Fault,
        }
    }

    pub fn is_active(&self, t: f64) -> bool {
        self.start() <= t && t < self.end()
    }

    pub fn validate(&self) -> Result<()> {
        let (start, end) = (self.start(), self.end());
        if !(start.is_finite() && end.is_finite() && start >= 0.0) {
            return Err(Error::invalid("event", "start and end must be finite, start >= 0"));
        }
        if end <= start {
            return Err(Error::invalid("event", format!("end {end} s must follow start {start} s")));
        }
        match self {
            Event::Sag(s) => {
                if !(s.depth > 0.0 && s.depth < 1.0) {
                    return Err(Error::invalid("sag event", "depth must lie in (0, 1)"));
                }
                for h in &s.harmonics {
                    if h.order < 2 || !h.fraction.is_finite() || h.fraction < 0.0 {
                        return Err(Error::invalid(
                            "sag event",
                            "harmonics need order >= 2 and a non-negative fraction",
                        ));
                    }
                }
            }
            Event::Fault(f) => {
                if !(f.fault_resistance >= 0.0 && f.fault_resistance.is_finite()) {
                    return Err(Error::invalid("fault event", "fault_resistance must be >= 0"));
                }
            }
        }
        Ok(())
    }
}

/// Checks every event and rejects overlaps. Events must already be sorted
/// by start time.
pub fn validate_events(events: &[Event]) -> Result<()> {
    for e in events {
        e.validate()?;
    }
    for pair in events.windows(2) {
        if pair[1].start() < pair[0].start() {
            return Err(Error::invalid("event list", "events must be sorted by start time"));
        }
        if pair[1].start() < pair[0].end() {
            return Err(Error::OverlappingEvents(format!(
                "{} [{}, {}) s overlaps {} [{}, {}) s",
                pair[0].kind().as_str(),
                pair[0].start(),
                pair[0].end(),
                pair[1].kind().as_str(),
                pair[1].start(),
                pair[1].end()
            )));
        }
    }
    Ok(())
}

/// Undisturbed source waveform `V_m sin(omega t)`.
pub fn nominal_voltage(t: f64, grid: &GridParams) -> f64 {
    grid.v_peak() * (grid.omega() * t).sin()
}

/// Source EMF including any active sag and its distortion.
pub fn source_voltage(t: f64, grid: &GridParams, events: &[Event]) -> f64 {
    let wt = grid.omega() * t;
    let sag = events.iter().find_map(|e| match e {
        Event::Sag(s) if e.is_active(t) => Some(s),
        _ => None,
    });
    match sag {
        None => grid.v_peak() * wt.sin(),
        Some(s) => {
            let distortion: f64 = s
                .harmonics
                .iter()
                .map(|h| h.fraction * (h.order as f64 * wt).sin())
                .sum();
            grid.v_peak() * ((1.0 - s.depth) * wt.sin() + distortion)
        }
    }
}

/// The fault, if any, in effect at `t`.
pub fn active_fault(t: f64, events: &[Event]) -> Option<&FaultEvent> {
    events.iter().find_map(|e| match e {
        Event::Fault(f) if e.is_active(t) => Some(f),
        _ => None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sag(start: f64, end: f64) -> Event {
        Event::Sag(SagEvent {
            start,
            end,
            depth: 0.28,
            harmonics: vec![],
        })
    }

    fn fault(start: f64, end: f64) -> Event {
        Event::Fault(FaultEvent {
            start,
            end,
            fault_resistance: 0.0,
        })
    }

    #[test]
    fn overlap_is_rejected() {
        assert!(validate_events(&[sag(0.1, 0.2), fault(0.25, 0.35)]).is_ok());
        assert!(validate_events(&[sag(0.1, 0.2), fault(0.2, 0.35)]).is_ok());
        assert!(matches!(
            validate_events(&[sag(0.1, 0.3), fault(0.25, 0.35)]),
            Err(Error::OverlappingEvents(_))
        ));
    }

    #[test]
    fn bad_events() {
        assert!(sag(0.2, 0.1).validate().is_err());
        let deep = Event::Sag(SagEvent { start: 0.0, end: 1.0, depth: 1.0, harmonics: vec![] });
        assert!(deep.validate().is_err());
        let neg = Event::Fault(FaultEvent { start: 0.0, end: 1.0, fault_resistance: -1.0 });
        assert!(neg.validate().is_err());
    }

    #[test]
    fn sag_scales_source() {
        let grid = crate::scenario::presets::table2().grid;
        let events = [sag(0.1, 0.2)];
        let t = 0.105;
        let nominal = nominal_voltage(t, &grid);
        assert!((source_voltage(t, &grid, &events) - 0.72 * nominal).abs() < 1e-12);
        assert_eq!(source_voltage(0.205, &grid, &events), nominal_voltage(0.205, &grid));
    }
}
