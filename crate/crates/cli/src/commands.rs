//! Subcommand implementations. Each returns its stdout text or a
//! [`CliError`] carrying the process exit code.

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nightfusion::fusion::{FusionPipeline, FusionState};
use nightfusion::metrics::summarize;
use nightfusion::radiometry::query_pixel;
use nightfusion::servo::CameraGeometry;
use nightfusion::sim::run_closed_loop;
use nightfusion::GrayImage;
use thiserror::Error;

use crate::config::AppConfig;
use crate::pnm::{self, Pnm, PnmError};
use crate::report::render_report;
use crate::trace_csv::{format_sig6, read_trace, write_trace, TraceError};

/// Worker-thread cap for output writing.
pub const THREADS_ENV: &str = "NFS_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, configuration or user-supplied input (exit 1).
    #[error("{0}")]
    Usage(String),
    /// Problems with frame data on disk (exit 2).
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Regular, non-hidden files of `dir` in filename order.
fn list_frames(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| data(format!("{}: {e}", dir.display())))?;
        let hidden = entry.file_name().to_string_lossy().starts_with('.');
        if !hidden && entry.file_type().map(|t| t.is_file()).unwrap_or(false) {
            files.push(entry.path());
        }
    }
    files.sort();
    Ok(files)
}

fn worker_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// L_hat mapped through the Inferno colormap over a fixed [0, 1] range.
fn render_inferno(l_hat: &GrayImage) -> Pnm {
    let samples = l_hat
        .data()
        .iter()
        .flat_map(|&v| {
            let c = colorous::INFERNO.eval_continuous(v.clamp(0.0, 1.0));
            [c.r, c.g, c.b].map(u16::from)
        })
        .collect();
    Pnm {
        width: l_hat.width(),
        height: l_hat.height(),
        maxval: 255,
        channels: 3,
        samples,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FuseSummary {
    pub frames: usize,
    pub fuse_ms: Vec<f64>,
}

/// Fuses every `(rgb, thermal)` pair and writes, per frame, the fused frame,
/// the 16-bit L_hat map and its colour rendering, plus `timing.csv`.
pub fn cmd_fuse(rgb_dir: &Path, thermal_dir: &Path, out_dir: &Path, config: Option<&Path>) -> Result<FuseSummary, CliError> {
    let cfg = AppConfig::load_or_default(config).map_err(usage)?;
    let pipeline = FusionPipeline::with_builtin(cfg.fusion).map_err(usage)?;

    let rgb_files = list_frames(rgb_dir)?;
    let thermal_files = list_frames(thermal_dir)?;
    if rgb_files.is_empty() && thermal_files.is_empty() {
        return Err(data("no frames"));
    }
    if rgb_files.len() != thermal_files.len() {
        return Err(data(format!(
            "unpaired frames: {} rgb vs {} thermal",
            rgb_files.len(),
            thermal_files.len()
        )));
    }
    fs::create_dir_all(out_dir).map_err(|e| data(format!("{}: {e}", out_dir.display())))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads())
        .build()
        .map_err(data)?;

    let named = |e: PnmError, path: &Path| data(format!("{}: {e}", path.display()));
    let mut state = FusionState::new();
    let mut fuse_ms = Vec::with_capacity(rgb_files.len());
    for (rgb_path, thermal_path) in rgb_files.iter().zip(&thermal_files) {
        let rgb = pnm::read_rgb(rgb_path).map_err(|e| named(e, rgb_path))?;
        let thermal = pnm::read_thermal(thermal_path).map_err(|e| named(e, thermal_path))?;

        let start = Instant::now();
        let frame = pipeline
            .process(&rgb, &thermal, &mut state)
            .map_err(|e| data(format!("{}: {e}", rgb_path.display())))?;
        fuse_ms.push(start.elapsed().as_secs_f64() * 1000.0);

        let stem = rgb_path.file_stem().map_or_else(|| "frame".into(), |s| s.to_string_lossy().into_owned());
        let fused_path = out_dir.join(format!("fused_{stem}.ppm"));
        let lhat_path = out_dir.join(format!("lhat_{stem}.pgm"));
        let render_path = out_dir.join(format!("lhat_{stem}_inferno.ppm"));
        let (mut r1, mut r2, mut r3) = (Ok(()), Ok(()), Ok(()));
        pool.scope(|s| {
            s.spawn(|_| r1 = pnm::write_rgb(&fused_path, &frame.fused));
            s.spawn(|_| r2 = pnm::write_gray16(&lhat_path, &frame.l_hat));
            s.spawn(|_| r3 = pnm::write_pnm(&render_path, &render_inferno(&frame.l_hat)));
        });
        r1.and(r2).and(r3).map_err(data)?;
    }

    let mut timing = String::from("frame,fuse_ms\n");
    for (i, ms) in fuse_ms.iter().enumerate() {
        timing.push_str(&format!("{i},{}\n", format_sig6(*ms)));
    }
    fs::write(out_dir.join("timing.csv"), timing).map_err(data)?;
    Ok(FuseSummary {
        frames: rgb_files.len(),
        fuse_ms,
    })
}

/// Runs the closed-loop simulator and writes the trace CSV.
pub fn cmd_simulate(config: Option<&Path>, trace_out: &Path) -> Result<usize, CliError> {
    let cfg = AppConfig::load_or_default(config).map_err(usage)?;
    let motion = cfg.motion.build().map_err(usage)?;
    let trace = run_closed_loop(&cfg.sim_config(), &cfg.pid_gains(), &cfg.servo, motion.as_ref(), &cfg.detector).map_err(usage)?;
    let file = fs::File::create(trace_out).map_err(|e| data(format!("{}: {e}", trace_out.display())))?;
    write_trace(BufWriter::new(file), &trace).map_err(data)?;
    Ok(trace.len())
}

/// Reads a trace and renders the statistics report.
pub fn cmd_metrics(trace_path: &Path, hfov: f64, width: usize) -> Result<String, CliError> {
    let geom = CameraGeometry::new(hfov, width).map_err(usage)?;
    let file = fs::File::open(trace_path).map_err(|e| usage(format!("{}: {e}", trace_path.display())))?;
    let trace = read_trace(file).map_err(|e| match e {
        TraceError::Malformed { line, reason } => usage(format!("{}:{line}: {reason}", trace_path.display())),
        other => usage(format!("{}: {other}", trace_path.display())),
    })?;
    let stats = summarize(&trace, &geom).map_err(usage)?;
    Ok(render_report(&stats))
}

/// Temperature at one pixel of a 16-bit thermal frame.
pub fn cmd_query_temp(thermal_path: &Path, x: i64, y: i64) -> Result<String, CliError> {
    let frame = pnm::read_thermal(thermal_path).map_err(|e| usage(format!("{}: {e}", thermal_path.display())))?;
    let t = query_pixel(&frame, x, y).map_err(usage)?;
    Ok(format!("T({x},{y}) = {t:.2} C"))
}
