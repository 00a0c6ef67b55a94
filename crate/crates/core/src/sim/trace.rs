use serde::{Deserialize, Serialize};

use super::events::{Event, EventKind};
use super::OperatingMode;
use crate::error::{Error, Result};

/// Selectable numeric column of a [`WaveformTrace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    VSource,
    VPcc,
    VLoad,
    ILine,
    UComp,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::VSource,
        Channel::VPcc,
        Channel::VLoad,
        Channel::ILine,
        Channel::UComp,
    ];

    /// Column name in the CSV header.
    pub fn column(self) -> &'static str {
        match self {
            Channel::VSource => "v_source_V",
            Channel::VPcc => "v_pcc_V",
            Channel::VLoad => "v_load_V",
            Channel::ILine => "i_line_A",
            Channel::UComp => "u_comp_V",
        }
    }

    pub fn from_name(name: &str) -> Option<Channel> {
        let n = name.trim();
        Channel::ALL.into_iter().find(|c| {
            c.column().eq_ignore_ascii_case(n) || c.column().trim_end_matches(['V', 'A']).trim_end_matches('_') == n
        })
    }
}

/// One output row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub time: f64,
    pub v_source: f64,
    pub v_pcc: f64,
    pub v_load: f64,
    pub i_line: f64,
    pub u_comp: f64,
    pub mode: OperatingMode,
    pub switches_on: bool,
}

/// Uniformly sampled simulation output, stored column-wise.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WaveformTrace {
    pub sample_period: f64,
    pub time: Vec<f64>,
    pub v_source: Vec<f64>,
    pub v_pcc: Vec<f64>,
    pub v_load: Vec<f64>,
    pub i_line: Vec<f64>,
    pub u_comp: Vec<f64>,
    pub mode: Vec<OperatingMode>,
    pub switches_on: Vec<bool>,
}

impl WaveformTrace {
    pub fn with_capacity(sample_period: f64, rows: usize) -> Self {
        WaveformTrace {
            sample_period,
            time: Vec::with_capacity(rows),
            v_source: Vec::with_capacity(rows),
            v_pcc: Vec::with_capacity(rows),
            v_load: Vec::with_capacity(rows),
            i_line: Vec::with_capacity(rows),
            u_comp: Vec::with_capacity(rows),
            mode: Vec::with_capacity(rows),
            switches_on: Vec::with_capacity(rows),
        }
    }

    pub fn push(&mut self, row: TraceRow) {
        self.time.push(row.time);
        self.v_source.push(row.v_source);
        self.v_pcc.push(row.v_pcc);
        self.v_load.push(row.v_load);
        self.i_line.push(row.i_line);
        self.u_comp.push(row.u_comp);
        self.mode.push(row.mode);
        self.switches_on.push(row.switches_on);
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn row(&self, k: usize) -> TraceRow {
        TraceRow {
            time: self.time[k],
            v_source: self.v_source[k],
            v_pcc: self.v_pcc[k],
            v_load: self.v_load[k],
            i_line: self.i_line[k],
            u_comp: self.u_comp[k],
            mode: self.mode[k],
            switches_on: self.switches_on[k],
        }
    }

    pub fn channel(&self, c: Channel) -> &[f64] {
        match c {
            Channel::VSource => &self.v_source,
            Channel::VPcc => &self.v_pcc,
            Channel::VLoad => &self.v_load,
            Channel::ILine => &self.i_line,
            Channel::UComp => &self.u_comp,
        }
    }

    /// Index of the first sample at or after `t`.
    pub fn index_at(&self, t: f64) -> usize {
        let tol = 1e-6 * self.sample_period;
        self.time.partition_point(|&x| x < t - tol)
    }

    /// Samples of `c` covering `[start, start + duration)`.
    pub fn window(&self, c: Channel, start: f64, duration: f64) -> Result<&[f64]> {
        let n = (duration / self.sample_period).round() as usize;
        let i0 = self.index_at(start);
        if n == 0 || i0 + n > self.len() {
            return Err(Error::EmptyWindow);
        }
        Ok(&self.channel(c)[i0..i0 + n])
    }

    /// Checks the sampling invariants: strictly increasing, uniform time.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let same = [
            self.v_source.len(),
            self.v_pcc.len(),
            self.v_load.len(),
            self.i_line.len(),
            self.u_comp.len(),
            self.mode.len(),
            self.switches_on.len(),
        ];
        if same.iter().any(|&m| m != n) {
            return Err(Error::invalid("trace", "columns differ in length"));
        }
        if !(self.sample_period > 0.0) {
            return Err(Error::invalid("trace", "sample period must be > 0"));
        }
        for (k, w) in self.time.windows(2).enumerate() {
            let d = w[1] - w[0];
            // Stored traces carry 9 significant digits; allow for that rounding.
            let tol = 1e-6 * self.sample_period + 1e-8 * w[1].abs();
            if !(d > 0.0) || (d - self.sample_period).abs() > tol {
                return Err(Error::invalid(
                    "trace",
                    format!("non-uniform sampling between rows {} and {}", k, k + 1),
                ));
            }
        }
        Ok(())
    }
}

/// One record of the event stream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LogEntry {
    ModeChange {
        time: f64,
        from: OperatingMode,
        to: OperatingMode,
        /// Line current just before and after the change.
        i_before: f64,
        i_after: f64,
    },
    EventStart { time: f64, kind: EventKind },
    EventEnd { time: f64, kind: EventKind },
    /// The compensation command hit the DC-link clamp.
    Saturation { time: f64 },
}

impl LogEntry {
    pub fn time(&self) -> f64 {
        match *self {
            LogEntry::ModeChange { time, .. }
            | LogEntry::EventStart { time, .. }
            | LogEntry::EventEnd { time, .. }
            | LogEntry::Saturation { time } => time,
        }
    }
}

/// Time-ordered record of mode transitions and scenario events.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EventLog {
    pub entries: Vec<LogEntry>,
    /// Last sample time of the run.
    pub horizon: f64,
}

impl EventLog {
    /// Rebuilds the log of a stored trace from its mode column and the
    /// scenario events that produced it.
    pub fn reconstruct(trace: &WaveformTrace, events: &[Event]) -> EventLog {
        let mut entries = scenario_entries(events);
        for k in 1..trace.len() {
            if trace.mode[k] != trace.mode[k - 1] {
                entries.push(LogEntry::ModeChange {
                    time: trace.time[k],
                    from: trace.mode[k - 1],
                    to: trace.mode[k],
                    i_before: trace.i_line[k],
                    i_after: trace.i_line[k],
                });
            }
        }
        let mut log = EventLog {
            entries,
            horizon: trace.time.last().copied().unwrap_or(0.0),
        };
        log.sort();
        log
    }

    pub fn sort(&mut self) {
        self.entries.sort_by(|a, b| a.time().total_cmp(&b.time()));
    }

    pub fn mode_changes(&self) -> impl Iterator<Item = &LogEntry> {
        self.entries.iter().filter(|e| matches!(e, LogEntry::ModeChange { .. }))
    }

    /// Intervals spent in `mode`, starting from Normal at t = 0.
    pub fn mode_intervals(&self, mode: OperatingMode) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut current = OperatingMode::Normal;
        let mut since = 0.0;
        for e in self.mode_changes() {
            if let LogEntry::ModeChange { time, to, .. } = *e {
                if current == mode {
                    out.push((since, time));
                }
                current = to;
                since = time;
            }
        }
        if current == mode && self.horizon > since {
            out.push((since, self.horizon));
        }
        out
    }

    /// `[start, end)` windows of scenario events of one kind.
    pub fn event_windows(&self, kind: EventKind) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut open: Option<f64> = None;
        for e in &self.entries {
            match *e {
                LogEntry::EventStart { time, kind: k } if k == kind => open = Some(time),
                LogEntry::EventEnd { time, kind: k } if k == kind => {
                    if let Some(s) = open.take() {
                        out.push((s, time));
                    }
                }
                _ => {}
            }
        }
        if let Some(s) = open {
            out.push((s, self.horizon));
        }
        out
    }
}

pub(crate) fn scenario_entries(events: &[Event]) -> Vec<LogEntry> {
    events
        .iter()
        .flat_map(|e| {
            [
                LogEntry::EventStart { time: e.start(), kind: e.kind() },
                LogEntry::EventEnd { time: e.end(), kind: e.kind() },
            ]
        })
        .collect()
}
