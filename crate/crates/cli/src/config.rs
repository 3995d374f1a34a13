//! JSON experiment configuration.
//!
//! One object per section; absent keys take their defaults and unknown keys
//! are rejected, naming the key.
//!
//! ```json
//! {
//!   "fusion":   { "guided_mode": "fast", "clahe_enabled": true },
//!   "gains":    { "kp": 0.03, "ki": 0.002, "kd": 0.0005 },
//!   "servo":    { "theta_min": -90, "theta_max": 90 },
//!   "geometry": { "hfov": 60, "width": 640 },
//!   "sim":      { "frames": 300, "dt": 0.0666667 },
//!   "motion":   { "kind": "sinusoid", "amplitude_deg": 10, "period_s": 8 },
//!   "detector": { "p_detect": 0.9, "noise_sigma": 2, "seed": 42 }
//! }
//! ```

use std::path::Path;

use nightfusion::fusion::{FusionConfig, RefinerRegistry};
use nightfusion::servo::{CameraGeometry, PidGains, ServoLimits, ServoState};
use nightfusion::sim::{DetectorModel, MotionRegistry, SimConfig, TargetMotion};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Value(#[from] nightfusion::Error),
}

/// PID gains; `dt` defaults to the simulation frame interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainsSection {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    pub dt: Option<f64>,
}

impl Default for GainsSection {
    fn default() -> Self {
        Self {
            kp: 0.03,
            ki: 0.002,
            kd: 0.0005,
            dt: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub frames: usize,
    pub dt: f64,
    pub latency_mean: f64,
    pub latency_sigma: f64,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            frames: d.frames,
            dt: d.dt,
            latency_mean: d.latency_mean,
            latency_sigma: d.latency_sigma,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppConfig {
    pub fusion: FusionConfig,
    pub gains: GainsSection,
    pub servo: ServoLimits,
    pub geometry: CameraGeometry,
    pub sim: SimSection,
    pub motion: TargetMotion,
    pub detector: DetectorModel,
}

impl AppConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: AppConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Defaults when `path` is `None`.
    pub fn load_or_default(path: Option<&Path>) -> Result<Self, ConfigError> {
        match path {
            Some(p) => Self::load(p),
            None => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<(), nightfusion::Error> {
        self.fusion.validate()?;
        let refiners = RefinerRegistry::builtin();
        if !refiners.contains(&self.fusion.guided_mode) {
            refiners.build(&self.fusion.guided_mode, &self.fusion)?;
        }
        self.geometry.validate()?;
        self.sim_config().validate()?;
        let gains = self.pid_gains();
        gains.validate()?;
        if gains.dt != self.sim.dt {
            return Err(nightfusion::Error::InvalidParameter {
                name: "gains.dt".into(),
                reason: format!("{} differs from sim.dt {}", gains.dt, self.sim.dt),
            });
        }
        ServoState::from_limits(&self.servo, &gains)?;
        MotionRegistry::builtin().build(&self.motion)?;
        self.detector.validate()?;
        Ok(())
    }

    pub fn pid_gains(&self) -> PidGains {
        PidGains {
            kp: self.gains.kp,
            ki: self.gains.ki,
            kd: self.gains.kd,
            dt: self.gains.dt.unwrap_or(self.sim.dt),
        }
    }

    pub fn sim_config(&self) -> SimConfig {
        SimConfig {
            geometry: self.geometry,
            frames: self.sim.frames,
            dt: self.sim.dt,
            latency_mean: self.sim.latency_mean,
            latency_sigma: self.sim.latency_sigma,
        }
    }
}
