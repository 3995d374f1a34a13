//! Deterministic closed-loop tracking simulator.
//!
//! Each frame the target azimuth is projected into the image with the linear
//! model `x = W/2 + (az - theta) * W / HFOV` (the exact inverse of the
//! pixel-to-degree conversion), passed through a stochastic detector, and fed
//! to the PID law. All random draws come from ChaCha streams keyed by
//! `(seed, frame)`, so a frame's draws do not depend on evaluation order.

mod motion;

pub use motion::{Linear, MotionFactory, MotionModel, MotionRegistry, Sinusoid, Static, Step, TargetMotion};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{TrackRecord, TrackTrace};
use crate::servo::{hold_on_miss, pid_step, pixel_error, CameraGeometry, PidGains, ServoLimits, ServoState};

const DETECT_DOMAIN: u64 = 0x6465_7465_6374_0001;
const LATENCY_DOMAIN: u64 = 0x6c61_7465_6e63_0002;

/// Random stream for one purpose and one frame.
fn keyed_rng(seed: u64, domain: u64, frame: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain);
    rng.set_stream(frame);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorModel {
    pub p_detect: f64,
    /// Centroid noise, pixels.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for DetectorModel {
    fn default() -> Self {
        Self {
            p_detect: 0.9,
            noise_sigma: 2.0,
            seed: 42,
        }
    }
}

impl DetectorModel {
    pub fn perfect() -> Self {
        Self {
            p_detect: 1.0,
            noise_sigma: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_detect) {
            return Err(Error::param("detector.p_detect", format!("must lie in [0, 1], got {}", self.p_detect)));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return Err(Error::param("detector.noise_sigma", format!("must be >= 0, got {}", self.noise_sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub geometry: CameraGeometry,
    pub frames: usize,
    /// Frame interval, seconds.
    pub dt: f64,
    pub latency_mean: f64,
    pub latency_sigma: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            geometry: CameraGeometry::default(),
            frames: 300,
            dt: 1.0 / 15.0,
            latency_mean: 69.0,
            latency_sigma: 8.0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if self.frames == 0 {
            return Err(Error::param("sim.frames", "must be >= 1"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("sim.dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.latency_mean >= 0.0) {
            return Err(Error::param("sim.latency_mean", format!("must be >= 0, got {}", self.latency_mean)));
        }
        if !(self.latency_sigma >= 0.0) {
            return Err(Error::param("sim.latency_sigma", format!("must be >= 0, got {}", self.latency_sigma)));
        }
        Ok(())
    }
}

pub fn target_azimuth(motion: &dyn MotionModel, t: f64) -> f64 {
    motion.azimuth(t)
}

/// Image column of a target at `az_target` seen by a head panned to
/// `theta_pan`. May fall outside the frame.
pub fn project_to_pixel(az_target: f64, theta_pan: f64, geom: &CameraGeometry) -> f64 {
    geom.center_x() + (az_target - theta_pan) * geom.pixels_per_degree()
}

/// Measured centroid, or `None` for a miss. Targets outside `[0, width)` are
/// never detected.
///
/// # Panics
/// If `model.noise_sigma` is negative or not finite (see [`DetectorModel::validate`]).
pub fn detect(x_true: f64, width: usize, model: &DetectorModel, frame_index: u64) -> Option<f64> {
    let w = width as f64;
    if !(0.0..w).contains(&x_true) {
        return None;
    }
    let mut rng = keyed_rng(model.seed, DETECT_DOMAIN, frame_index);
    if rng.random::<f64>() >= model.p_detect {
        return None;
    }
    if model.noise_sigma == 0.0 {
        return Some(x_true);
    }
    let noise = Normal::new(0.0, model.noise_sigma).expect("sigma must be finite and non-negative").sample(&mut rng);
    Some((x_true + noise).clamp(0.0, w - 1.0))
}

/// Modelled capture-to-actuation latency for one frame, milliseconds.
///
/// # Panics
/// If `sigma` is negative or not finite.
pub fn sample_latency(mean: f64, sigma: f64, seed: u64, frame_index: u64) -> f64 {
    if sigma == 0.0 {
        return mean.max(0.0);
    }
    let mut rng = keyed_rng(seed, LATENCY_DOMAIN, frame_index);
    Normal::new(mean, sigma).expect("sigma must be finite and non-negative").sample(&mut rng).max(0.0)
}

/// Runs the full loop for `sim.frames` frames.
pub fn run_closed_loop(
    sim: &SimConfig,
    gains: &PidGains,
    limits: &ServoLimits,
    motion: &dyn MotionModel,
    model: &DetectorModel,
) -> Result<TrackTrace> {
    sim.validate()?;
    gains.validate()?;
    model.validate()?;
    if gains.dt != sim.dt {
        return Err(Error::param("gains.dt", format!("{} differs from sim.dt {}", gains.dt, sim.dt)));
    }
    let geom = &sim.geometry;
    let mut servo = ServoState::from_limits(limits, gains)?;
    let mut records = Vec::with_capacity(sim.frames);
    for frame in 0..sim.frames as u64 {
        let t = frame as f64 * sim.dt;
        let x_true = project_to_pixel(target_azimuth(motion, t), servo.theta(), geom);
        let (e_px, theta_deg) = match detect(x_true, geom.width, model, frame) {
            Some(x) => {
                let e = pixel_error(x, geom.center_x());
                (Some(e), pid_step(&mut servo, gains, e))
            }
            None => (None, hold_on_miss(&servo)),
        };
        records.push(TrackRecord {
            frame,
            t_ms: t * 1000.0,
            e_px,
            theta_deg,
            latency_ms: sample_latency(sim.latency_mean, sim.latency_sigma, model.seed, frame),
        });
    }
    TrackTrace::new(records)
}
