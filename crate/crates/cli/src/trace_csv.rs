//! Trace CSV: `frame,t_ms,detected,e_px,theta_deg,latency_ms`.
//!
//! Floats carry six significant digits in `%g` style, `e_px` is an empty
//! field on frames without a detection, and lines end in LF.

use std::io::{Read, Write};

use nightfusion::metrics::{TrackRecord, TrackTrace};
use thiserror::Error;

pub const HEADER: [&str; 6] = ["frame", "t_ms", "detected", "e_px", "theta_deg", "latency_ms"];

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {line}: {reason}")]
    Malformed { line: u64, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Invalid(#[from] nightfusion::Error),
}

/// `%.6g`-style formatting: six significant digits, trailing zeros removed,
/// scientific notation outside `1e-4 <= |v| < 1e6`.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_fraction(mantissa), exp.abs());
    }
    let decimals = (5 - exp) as usize;
    trim_fraction(&format!("{v:.decimals$}")).to_string()
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_trace<W: Write>(out: W, trace: &TrackTrace) -> Result<(), TraceError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in trace.records() {
        w.write_record([
            r.frame.to_string(),
            format_sig6(r.t_ms),
            if r.detected() { "1" } else { "0" }.to_string(),
            r.e_px.map(format_sig6).unwrap_or_default(),
            format_sig6(r.theta_deg),
            format_sig6(r.latency_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn trace_to_string(trace: &TrackTrace) -> String {
    let mut buf = Vec::new();
    write_trace(&mut buf, trace).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

fn parse_f64(field: &str, name: &str, line: u64) -> Result<f64, TraceError> {
    field
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| TraceError::Malformed {
            line,
            reason: format!("{name}: expected a finite number, got `{field}`"),
        })
}

pub fn read_trace<R: Read>(input: R) -> Result<TrackTrace, TraceError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(TraceError::Malformed {
            line: 1,
            reason: format!("expected header `{}`", HEADER.join(",")),
        });
    }
    let mut records = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            TraceError::Malformed { line, reason: e.to_string() }
        })?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |reason: String| TraceError::Malformed { line, reason };
        let frame = row[0].parse::<u64>().map_err(|_| bad(format!("frame: expected an integer, got `{}`", &row[0])))?;
        let t_ms = parse_f64(&row[1], "t_ms", line)?;
        let detected = match &row[2] {
            "1" => true,
            "0" => false,
            other => return Err(bad(format!("detected: expected 0 or 1, got `{other}`"))),
        };
        let e_px = match (&row[3], detected) {
            ("", false) => None,
            ("", true) => return Err(bad("e_px missing on a detected frame".into())),
            (f, true) => Some(parse_f64(f, "e_px", line)?),
            (_, false) => return Err(bad("e_px present on a frame without detection".into())),
        };
        records.push(TrackRecord {
            frame,
            t_ms,
            e_px,
            theta_deg: parse_f64(&row[4], "theta_deg", line)?,
            latency_ms: parse_f64(&row[5], "latency_ms", line)?,
        });
    }
    TrackTrace::new(records).map_err(|e| match e {
        nightfusion::Error::InvalidRecord { index, reason } => TraceError::Malformed { line: index as u64 + 2, reason },
        other => other.into(),
    })
}
