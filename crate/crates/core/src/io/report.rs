//! Text-plus-JSON reports.
//!
//! The text part lists `key = value unit` lines per section, values in
//! scientific notation with four significant digits, followed by any
//! table. The JSON part after the `--- json ---` marker holds the same
//! content with full precision.

use std::io::Write;

use serde::Serialize;

use crate::analysis::{OperatingPoint, ScenarioMetrics, TopologyRow};
use crate::design::DesignReport;
use crate::error::Result;
use crate::sim::{EventLog, LogEntry};

pub const JSON_MARKER: &str = "--- json ---";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEntry {
    pub key: String,
    pub value: f64,
    /// `"1"` for dimensionless quantities.
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Section {
    pub name: String,
    pub entries: Vec<ReportEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            ..Section::default()
        }
    }

    pub fn entry(mut self, key: &str, value: f64, unit: &str) -> Self {
        self.entries.push(ReportEntry {
            key: key.to_string(),
            value,
            unit: if unit.is_empty() { "1".into() } else { unit.to_string() },
        });
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Report {
    pub title: String,
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            sections: Vec::new(),
        }
    }

    pub fn section(mut self, section: Section) -> Self {
        self.sections.push(section);
        self
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("# {}\n", self.title);
        for s in &self.sections {
            out.push_str(&format!("\n[{}]\n", s.name));
            for e in &s.entries {
                let unit = if e.unit == "1" { "" } else { e.unit.as_str() };
                out.push_str(format!("{} = {:.3e} {}", e.key, e.value, unit).trim_end());
                out.push('\n');
            }
            if let Some(t) = &s.table {
                out.push_str(&render_table(t));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write<W: Write>(&self, out: &mut W) -> Result<()> {
        write!(out, "{}\n{JSON_MARKER}\n{}\n", self.to_text(), self.to_json())?;
        Ok(())
    }

    pub fn write_file(&self, path: &std::path::Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }
}

fn render_table(t: &Table) -> String {
    let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
    for row in &t.rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(&t.columns);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule));
    for row in &t.rows {
        out.push_str(&line(row));
    }
    out
}

pub fn design_report_doc(r: &DesignReport) -> Report {
    Report::new("design").section(
        Section::new("design")
            .entry("rated_current", r.rated_current, "A")
            .entry("l_m_max", r.l_m_max, "H")
            .entry("dc_link_max", r.dc_link_max, "V")
            .entry("turns_ratio", r.turns_ratio, "")
            .entry("series_ratio_k", r.series_ratio_k, "")
            .entry("transformer_va", r.transformer_va, "VA")
            .entry("stress_fault_pos", r.stress_fault_pos, "V")
            .entry("stress_fault_neg", r.stress_fault_neg, "V")
            .entry("stress_comp", r.stress_comp, "V"),
    )
}

/// Metrics that could not be computed for the run are left out.
pub fn metrics_section(m: &ScenarioMetrics) -> Section {
    let mut s = Section::new("metrics")
        .entry("sag_depth", m.sag_depth, "")
        .entry("compensation_error", m.compensation_error, "");
    let optional = [
        ("limiting_ratio", m.limiting_ratio, ""),
        ("fault_amplitude", m.fault_amplitude, "A"),
        ("max_fault_current", m.max_fault_current, "A"),
        ("efficiency", m.efficiency, ""),
    ];
    for (key, value, unit) in optional {
        if let Some(v) = value {
            s = s.entry(key, v, unit);
        }
    }
    s
}

pub fn log_table(log: &EventLog) -> Table {
    let rows = log
        .entries
        .iter()
        .map(|e| {
            let (what, detail) = match *e {
                LogEntry::ModeChange { from, to, i_after, .. } => {
                    ("mode".to_string(), format!("{from} -> {to} at i = {i_after:.4e} A"))
                }
                LogEntry::EventStart { kind, .. } => ("event".to_string(), format!("{} start", kind.as_str())),
                LogEntry::EventEnd { kind, .. } => ("event".to_string(), format!("{} end", kind.as_str())),
                LogEntry::Saturation { .. } => ("saturation".to_string(), "dc link clamp reached".to_string()),
            };
            vec![format!("{:.6e}", e.time()), what, detail]
        })
        .collect();
    Table {
        columns: vec!["time_s".into(), "entry".into(), "detail".into()],
        rows,
    }
}

fn yes_no(v: bool) -> String {
    if v { "YES" } else { "NO" }.to_string()
}

pub fn topology_report(rows: &[TopologyRow], op: &OperatingPoint) -> Report {
    let table = Table {
        columns: [
            "reference",
            "transformers",
            "switches_3ph",
            "dc_sources_3ph",
            "compensates_sag",
            "limits_fault",
            "loss_W",
        ]
        .map(String::from)
        .to_vec(),
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    r.entry.display_name(),
                    r.entry.transformers.to_string(),
                    r.entry.switches.to_string(),
                    r.entry.dc_sources.to_string(),
                    yes_no(r.entry.compensates_sag),
                    yes_no(r.entry.limits_fault),
                    r.loss.map_or_else(|| "N/A".to_string(), |p| format!("{p:.4e}")),
                ]
            })
            .collect(),
    };
    let mut losses = Section::new("losses");
    for r in rows {
        if let Some(p) = r.loss {
            losses = losses.entry(&format!("loss_{}", r.entry.label), p, "W");
        }
    }
    Report::new("topology comparison")
        .section(
            Section::new("operating_point")
                .entry("i_pri", op.i_pri, "A")
                .entry("i_sec", op.i_sec, "A")
                .entry("i_line", op.i_line, "A"),
        )
        .section(losses.with_table(table))
}
