//! File formats: waveform CSV, reports and topology parameter files.

mod report;
mod topology_params;
mod trace_csv;

use std::path::Path;

pub use report::{
    design_report_doc, log_table, metrics_section, topology_report, Report, ReportEntry, Section, Table,
};
pub use topology_params::{parse_topology_params, TopologyInputs};
pub use trace_csv::{read_trace, write_trace, TRACE_HEADER};

use crate::error::Result;
use crate::scenario::{parse_scenario, Scenario};
use crate::sim::WaveformTrace;

pub fn read_scenario_file(path: &Path) -> Result<Scenario> {
    parse_scenario(&std::fs::read_to_string(path)?)
}

pub fn write_trace_file(trace: &WaveformTrace, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    write_trace(trace, &mut out)?;
    std::io::Write::flush(&mut out)?;
    Ok(())
}

pub fn read_trace_file(path: &Path) -> Result<WaveformTrace> {
    let file = std::fs::File::open(path)?;
    read_trace(std::io::BufReader::new(file))
}
