//! Target trajectories, each a [`MotionModel`] built by name.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Azimuth of the target over time.
pub trait MotionModel: Send + Sync {
    fn name(&self) -> &'static str;

    /// Target azimuth in degrees at `t` seconds.
    fn azimuth(&self, t: f64) -> f64;
}

/// Declarative trajectory description. Only the fields relevant to `kind`
/// are read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetMotion {
    pub kind: String,
    pub initial_deg: f64,
    pub step_time_s: f64,
    pub step_deg: f64,
    pub rate_deg_s: f64,
    pub amplitude_deg: f64,
    pub period_s: f64,
}

impl Default for TargetMotion {
    fn default() -> Self {
        Self {
            kind: "sinusoid".to_string(),
            initial_deg: 0.0,
            step_time_s: 1.0,
            step_deg: 10.0,
            rate_deg_s: 2.0,
            amplitude_deg: 10.0,
            period_s: 8.0,
        }
    }
}

impl TargetMotion {
    pub fn fixed(initial_deg: f64) -> Self {
        Self {
            kind: "static".into(),
            initial_deg,
            ..Self::default()
        }
    }

    pub fn step(initial_deg: f64, step_time_s: f64, step_deg: f64) -> Self {
        Self {
            kind: "step".into(),
            initial_deg,
            step_time_s,
            step_deg,
            ..Self::default()
        }
    }

    pub fn linear(initial_deg: f64, rate_deg_s: f64) -> Self {
        Self {
            kind: "linear".into(),
            initial_deg,
            rate_deg_s,
            ..Self::default()
        }
    }

    pub fn sinusoid(initial_deg: f64, amplitude_deg: f64, period_s: f64) -> Self {
        Self {
            kind: "sinusoid".into(),
            initial_deg,
            amplitude_deg,
            period_s,
            ..Self::default()
        }
    }

    /// Builds the model with the builtin registry.
    pub fn build(&self) -> Result<Box<dyn MotionModel>> {
        MotionRegistry::builtin().build(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Static {
    pub azimuth: f64,
}

impl MotionModel for Static {
    fn name(&self) -> &'static str {
        "static"
    }

    fn azimuth(&self, _t: f64) -> f64 {
        self.azimuth
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub initial: f64,
    pub at: f64,
    pub magnitude: f64,
}

impl MotionModel for Step {
    fn name(&self) -> &'static str {
        "step"
    }

    fn azimuth(&self, t: f64) -> f64 {
        if t < self.at {
            self.initial
        } else {
            self.initial + self.magnitude
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub initial: f64,
    pub rate: f64,
}

impl MotionModel for Linear {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn azimuth(&self, t: f64) -> f64 {
        self.initial + self.rate * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid {
    pub initial: f64,
    pub amplitude: f64,
    pub period: f64,
}

impl MotionModel for Sinusoid {
    fn name(&self) -> &'static str {
        "sinusoid"
    }

    fn azimuth(&self, t: f64) -> f64 {
        self.initial + self.amplitude * (TAU * t / self.period).sin()
    }
}

pub type MotionFactory = fn(&TargetMotion) -> Result<Box<dyn MotionModel>>;

#[derive(Clone, Default)]
pub struct MotionRegistry {
    factories: BTreeMap<String, MotionFactory>,
}

impl MotionRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register("static", |m| Ok(Box::new(Static { azimuth: m.initial_deg })));
        reg.register("step", |m| {
            if !(m.step_time_s >= 0.0) {
                return Err(Error::param("motion.step_time_s", format!("must be >= 0, got {}", m.step_time_s)));
            }
            Ok(Box::new(Step {
                initial: m.initial_deg,
                at: m.step_time_s,
                magnitude: m.step_deg,
            }))
        });
        reg.register("linear", |m| {
            Ok(Box::new(Linear {
                initial: m.initial_deg,
                rate: m.rate_deg_s,
            }))
        });
        reg.register("sinusoid", |m| {
            if !(m.period_s > 0.0) {
                return Err(Error::param("motion.period_s", format!("must be > 0, got {}", m.period_s)));
            }
            Ok(Box::new(Sinusoid {
                initial: m.initial_deg,
                amplitude: m.amplitude_deg,
                period: m.period_s,
            }))
        });
        reg
    }

    pub fn register(&mut self, name: &str, factory: MotionFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn build(&self, motion: &TargetMotion) -> Result<Box<dyn MotionModel>> {
        let factory = self.factories.get(&motion.kind).ok_or_else(|| Error::UnknownStrategy {
            kind: "motion.kind",
            name: motion.kind.clone(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        factory(motion)
    }
}

impl std::fmt::Debug for MotionRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
