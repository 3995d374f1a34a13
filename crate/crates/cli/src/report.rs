//! Plain-text and `key=value` rendering of [`TrackStats`].

use std::fmt::Write;

use nightfusion::metrics::{Summary, TrackStats};

use crate::trace_csv::format_sig6;

const NA: &str = "n/a";

fn with_median(s: &Summary, decimals: usize) -> String {
    format!("{:.decimals$} ± {:.decimals$} ({:.decimals$})", s.mean, s.std, s.median)
}

/// Human-readable table: FPS, latency, detection rate and absolute error,
/// each as `mean ± std (median)` where a median applies.
pub fn render_table(stats: &TrackStats) -> String {
    let mut out = String::new();
    let fps = stats.fps.map_or(NA.to_string(), |(m, s)| format!("{m:.1} ± {s:.1}"));
    let px = stats.abs_e_px.as_ref().map_or(NA.to_string(), |s| with_median(s, 1));
    let deg = stats.abs_e_deg.as_ref().map_or(NA.to_string(), |s| with_median(s, 2));
    let iqr = stats.abs_e_px.as_ref().map_or(NA.to_string(), |s| format!("{:.1}", s.iqr));
    let _ = writeln!(out, "FPS {fps}");
    let _ = writeln!(out, "Latency [ms] {}", with_median(&stats.latency, 1));
    let _ = writeln!(out, "Detection rate [%] {:.1}", stats.detection_rate);
    let _ = writeln!(out, "|e_t| [px] {px}");
    let _ = writeln!(out, "|e_t| [deg] {deg}");
    let _ = writeln!(out, "IQR |e_t| [px] {iqr}");
    let _ = writeln!(out, "Frames {} (detected {})", stats.n_frames, stats.n_detected);
    out
}

/// Machine-readable lines, one statistic per line.
pub fn render_key_values(stats: &TrackStats) -> String {
    let opt = |v: Option<f64>| v.map_or(NA.to_string(), format_sig6);
    let px = stats.abs_e_px.as_ref();
    let deg = stats.abs_e_deg.as_ref();
    let rows: [(&str, String); 16] = [
        ("n_frames", stats.n_frames.to_string()),
        ("n_detected", stats.n_detected.to_string()),
        ("detection_rate_pct", format_sig6(stats.detection_rate)),
        ("fps_mean", opt(stats.fps.map(|f| f.0))),
        ("fps_std", opt(stats.fps.map(|f| f.1))),
        ("latency_mean_ms", format_sig6(stats.latency.mean)),
        ("latency_std_ms", format_sig6(stats.latency.std)),
        ("latency_median_ms", format_sig6(stats.latency.median)),
        ("mean_abs_e_px", opt(px.map(|s| s.mean))),
        ("std_abs_e_px", opt(px.map(|s| s.std))),
        ("median_abs_e_px", opt(px.map(|s| s.median))),
        ("iqr_abs_e_px", opt(px.map(|s| s.iqr))),
        ("mean_abs_e_deg", opt(deg.map(|s| s.mean))),
        ("std_abs_e_deg", opt(deg.map(|s| s.std))),
        ("median_abs_e_deg", opt(deg.map(|s| s.median))),
        ("iqr_abs_e_deg", opt(deg.map(|s| s.iqr))),
    ];
    rows.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
}

/// Table, blank line, then `key=value` lines.
pub fn render_report(stats: &TrackStats) -> String {
    format!("{}\n{}", render_table(stats), render_key_values(stats))
}
