//! Anytime trace files: `elapsed_us,value`, one row per improvement.

use std::io;
use std::path::Path;

use csg_core::{TracePoint, Value};

/// Microsecond rows with strictly increasing timestamps. Points that land
/// in the same microsecond keep the last (best) value.
pub fn trace_rows(trace: &[TracePoint]) -> Vec<(u64, Value)> {
    let mut rows: Vec<(u64, Value)> = Vec::with_capacity(trace.len());
    for t in trace {
        let us = t.elapsed.as_micros() as u64;
        match rows.last_mut() {
            Some(last) if last.0 >= us => last.1 = t.value,
            _ => rows.push((us, t.value)),
        }
    }
    rows
}

pub fn write_trace(path: &Path, trace: &[TracePoint]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["elapsed_us", "value"])?;
    for (us, v) in trace_rows(trace) {
        w.write_record([us.to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trace(path: &Path) -> Result<Vec<(u64, Value)>, csv::Error> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != ["elapsed_us", "value"] {
        return Err(io::Error::new(io::ErrorKind::InvalidData, "unexpected trace header").into());
    }
    r.deserialize().collect()
}
