//! Tracking statistics over a per-frame trace.
//!
//! Frames without a detection carry no error sample. They count toward the
//! detection rate, latency and frame rate, but are excluded from every error
//! statistic rather than being treated as zero error. Spreads are population
//! standard deviations; medians and quartiles use the interpolated order
//! statistic of [`crate::order_stat`].

use crate::error::{Error, Result};
use crate::order_stat;
use crate::servo::{error_to_degrees, CameraGeometry};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackRecord {
    pub frame: u64,
    /// Milliseconds since the start of the run.
    pub t_ms: f64,
    /// Horizontal pixel error; `None` when the frame had no detection.
    pub e_px: Option<f64>,
    /// Commanded pan angle after this frame.
    pub theta_deg: f64,
    pub latency_ms: f64,
}

impl TrackRecord {
    pub fn detected(&self) -> bool {
        self.e_px.is_some()
    }
}

/// Non-empty, time-ordered sequence of records.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackTrace(Vec<TrackRecord>);

impl TrackTrace {
    /// Rejects empty traces, non-increasing timestamps and non-finite values.
    pub fn new(records: Vec<TrackRecord>) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyInput);
        }
        for (i, r) in records.iter().enumerate() {
            let finite = r.t_ms.is_finite()
                && r.theta_deg.is_finite()
                && r.latency_ms.is_finite()
                && r.e_px.is_none_or(f64::is_finite);
            if !finite {
                return Err(Error::InvalidRecord { index: i, reason: "non-finite value".into() });
            }
            if i > 0 && !(r.t_ms > records[i - 1].t_ms) {
                return Err(Error::InvalidRecord {
                    index: i,
                    reason: format!("t_ms {} not after {}", r.t_ms, records[i - 1].t_ms),
                });
            }
        }
        Ok(Self(records))
    }

    pub fn records(&self) -> &[TrackRecord] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_records(self) -> Vec<TrackRecord> {
        self.0
    }

    /// Absolute errors of detected frames, in trace order.
    pub fn abs_errors(&self) -> Vec<f64> {
        self.0.iter().filter_map(|r| r.e_px.map(f64::abs)).collect()
    }
}

/// Distribution summary of a set of samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub iqr: f64,
}

impl Summary {
    /// Population statistics of `samples`.
    pub fn of(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptyInput);
        }
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sorted = order_stat::sorted(samples);
        let q = |p| order_stat::interpolated(&sorted, p);
        Ok(Self {
            mean,
            std: var.sqrt(),
            median: q(50.0)?,
            iqr: q(75.0)? - q(25.0)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackStats {
    /// `None` when no frame had a detection.
    pub abs_e_px: Option<Summary>,
    pub abs_e_deg: Option<Summary>,
    pub detection_rate: f64,
    /// `None` for single-record traces.
    pub fps: Option<(f64, f64)>,
    pub latency: Summary,
    pub n_frames: usize,
    pub n_detected: usize,
}

/// Statistics of `|e_px|` over detected frames. Fails with
/// [`Error::NoDetections`] when there are none.
pub fn abs_error_stats(trace: &TrackTrace) -> Result<Summary> {
    let errors = trace.abs_errors();
    if errors.is_empty() {
        return Err(Error::NoDetections);
    }
    Summary::of(&errors)
}

/// Percentage of frames with a detection.
pub fn detection_rate(trace: &TrackTrace) -> f64 {
    let detected = trace.records().iter().filter(|r| r.detected()).count();
    100.0 * detected as f64 / trace.len() as f64
}

/// Mean and population std of the instantaneous frame rate between adjacent
/// records.
pub fn fps_stats(trace: &TrackTrace) -> Result<(f64, f64)> {
    if trace.len() < 2 {
        return Err(Error::TooFewRecords { needed: 2, got: trace.len() });
    }
    let rates: Vec<f64> = trace.records().windows(2).map(|w| 1000.0 / (w[1].t_ms - w[0].t_ms)).collect();
    let s = Summary::of(&rates)?;
    Ok((s.mean, s.std))
}

pub fn latency_stats(trace: &TrackTrace) -> Summary {
    let lat: Vec<f64> = trace.records().iter().map(|r| r.latency_ms).collect();
    Summary::of(&lat).expect("trace is non-empty")
}

/// Every statistic of the trace. Degree statistics convert each frame's error
/// before aggregating.
pub fn summarize(trace: &TrackTrace, geom: &CameraGeometry) -> Result<TrackStats> {
    geom.validate()?;
    let px = trace.abs_errors();
    let deg: Vec<f64> = px.iter().map(|&e| error_to_degrees(e, geom)).collect();
    let optional = |v: &[f64]| if v.is_empty() { Ok(None) } else { Summary::of(v).map(Some) };
    let fps = match fps_stats(trace) {
        Ok(f) => Some(f),
        Err(Error::TooFewRecords { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(TrackStats {
        abs_e_px: optional(&px)?,
        abs_e_deg: optional(&deg)?,
        detection_rate: detection_rate(trace),
        fps,
        latency: latency_stats(trace),
        n_frames: trace.len(),
        n_detected: px.len(),
    })
}
