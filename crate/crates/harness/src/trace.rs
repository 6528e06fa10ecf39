use std::fs::File;
use std::io::Write;
use std::path::Path;

use betting_ope::{Interval, RunningIntersection};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// One row of a confidence-sequence trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: u64,
    pub v_lo: f64,
    pub v_hi: f64,
    pub v_lo_int: f64,
    pub v_hi_int: f64,
    pub method: String,
}

/// Rows for steps `t = stride, 2 stride, ...` (1-based), with the running
/// intersection of every interval up to `t`.
pub fn trace_rows(intervals: &[Interval], method: &str, stride: usize) -> Vec<TraceRow> {
    let stride = stride.max(1) as u64;
    let mut run = RunningIntersection::new();
    let mut rows = Vec::new();
    for (i, iv) in intervals.iter().enumerate() {
        let int = run.push(*iv);
        let t = i as u64 + 1;
        if t % stride == 0 {
            rows.push(TraceRow {
                t,
                v_lo: iv.lo,
                v_hi: iv.hi,
                v_lo_int: int.lo,
                v_hi_int: int.hi,
                method: method.to_string(),
            });
        }
    }
    rows
}

pub fn write_trace_rows<W: Write>(rows: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    // serde skips the header for an empty slice; write it explicitly.
    w.write_record(["t", "v_lo", "v_hi", "v_lo_int", "v_hi_int", "method"])?;
    for r in rows {
        w.write_record(&[
            r.t.to_string(),
            r.v_lo.to_string(),
            r.v_hi.to_string(),
            r.v_lo_int.to_string(),
            r.v_hi_int.to_string(),
            r.method.clone(),
        ])?;
    }
    w.flush().map_err(|e| HarnessError::io("<trace>", e))?;
    Ok(())
}

/// Writes the trace CSV and returns the number of data rows.
pub fn emit_trace(intervals: &[Interval], method: &str, stride: usize, path: &Path) -> Result<usize> {
    let rows = trace_rows(intervals, method, stride);
    let f = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_trace_rows(&rows, f)?;
    Ok(rows.len())
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<std::result::Result<_, _>>()?)
}
