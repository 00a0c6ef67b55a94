//! Comma-separated waveform files.
//!
//! Numbers are written in scientific notation with 9 significant digits
//! and a `.` decimal separator, independent of locale.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sim::{OperatingMode, TraceRow, WaveformTrace};

pub const TRACE_HEADER: &str = "time_s,v_source_V,v_pcc_V,v_load_V,i_line_A,u_comp_V,mode,switches";

pub fn write_trace<W: Write>(trace: &WaveformTrace, out: &mut W) -> Result<()> {
    if trace.is_empty() {
        return Err(Error::invalid("trace", "nothing to write"));
    }
    writeln!(out, "{TRACE_HEADER}")?;
    for k in 0..trace.len() {
        let r = trace.row(k);
        writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{},{}",
            r.time,
            r.v_source,
            r.v_pcc,
            r.v_load,
            r.i_line,
            r.u_comp,
            r.mode.code(),
            u8::from(r.switches_on)
        )?;
    }
    Ok(())
}

/// Reads a trace written by [`write_trace`]. The sample period is taken
/// from the first and last time stamps.
pub fn read_trace<R: BufRead>(input: R) -> Result<WaveformTrace> {
    let mut lines = input.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, message: "empty trace file".into() }),
    };
    if header.trim() != TRACE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header `{}`", header.trim()),
        });
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let n = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(parse_row(&line, n)?);
    }
    if rows.len() < 2 {
        return Err(Error::invalid("trace", "need at least two rows to infer the sample period"));
    }
    let span = rows[rows.len() - 1].time - rows[0].time;
    let mut trace = WaveformTrace::with_capacity(span / (rows.len() - 1) as f64, rows.len());
    for r in rows {
        trace.push(r);
    }
    trace.validate()?;
    Ok(trace)
}

fn parse_row(line: &str, n: usize) -> Result<TraceRow> {
    let fields: Vec<&str> = line.trim().split(',').collect();
    if fields.len() != 8 {
        return Err(Error::Parse {
            line: n,
            message: format!("expected 8 fields, found {}", fields.len()),
        });
    }
    let num = |k: usize| -> Result<f64> {
        let v: f64 = fields[k].trim().parse().map_err(|_| Error::Parse {
            line: n,
            message: format!("`{}` is not a number", fields[k]),
        })?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Parse { line: n, message: format!("`{}` is not finite", fields[k]) })
        }
    };
    let mode = {
        let s = fields[6].trim();
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => OperatingMode::from_code(c),
            _ => None,
        }
        .ok_or_else(|| Error::Parse {
            line: n,
            message: format!("unknown mode `{s}` (expected N, C or F)"),
        })?
    };
    let switches_on = match fields[7].trim() {
        "1" => true,
        "0" => false,
        other => {
            return Err(Error::Parse {
                line: n,
                message: format!("switch state `{other}` is not 0 or 1"),
            })
        }
    };
    Ok(TraceRow {
        time: num(0)?,
        v_source: num(1)?,
        v_pcc: num(2)?,
        v_load: num(3)?,
        i_line: num(4)?,
        u_comp: num(5)?,
        mode,
        switches_on,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64) -> TraceRow {
        TraceRow {
            time: t,
            v_source: 311.126983722 * t.sin(),
            v_pcc: -1.0 / 3.0,
            v_load: 0.0,
            i_line: 6.87e-3,
            u_comp: -87.115,
            mode: OperatingMode::Compensation,
            switches_on: true,
        }
    }

    #[test]
    fn one_row_file() {
        let mut trace = WaveformTrace::with_capacity(1e-5, 1);
        trace.push(row(0.0));
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], TRACE_HEADER);
        assert_eq!(
            lines[1],
            "0.00000000e0,0.00000000e0,-3.33333333e-1,0.00000000e0,6.87000000e-3,-8.71150000e1,C,1"
        );
    }

    #[test]
    fn rewrite_is_identical() {
        let mut trace = WaveformTrace::with_capacity(1e-5, 100);
        for k in 0..100 {
            trace.push(row(k as f64 * 1e-5));
        }
        let mut first = Vec::new();
        write_trace(&trace, &mut first).unwrap();
        let back = read_trace(first.as_slice()).unwrap();
        assert_eq!(back.len(), 100);
        let mut second = Vec::new();
        write_trace(&back, &mut second).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn rejects_bad_rows() {
        let bad = format!("{TRACE_HEADER}\n0,1,2,3,4,5,X,1\n");
        assert!(matches!(read_trace(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let short = format!("{TRACE_HEADER}\n0,1,2\n");
        assert!(matches!(read_trace(short.as_bytes()), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(read_trace("a,b\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(write_trace(&WaveformTrace::default(), &mut Vec::new()).is_err());
    }
}
