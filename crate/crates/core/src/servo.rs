//! Pan-axis PID tracking law and pixel/angle conversion.
//!
//! The controller is incremental: each step adds `kp*e + ki*e_sum + kd*e_diff`
//! to the current pan angle and clamps the result to the mechanical limits.
//! The integral term is bounded (anti-windup), and a missed detection holds
//! the angle without touching the controller memory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PidGains {
    /// Degrees per pixel.
    pub kp: f64,
    /// Degrees per pixel-second.
    pub ki: f64,
    /// Degrees per pixel/second.
    pub kd: f64,
    /// Control period, seconds.
    pub dt: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64, dt: f64) -> Result<Self> {
        let g = Self { kp, ki, kd, dt };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("gains.dt", format!("must be > 0, got {}", self.dt)));
        }
        for (name, v) in [("gains.kp", self.kp), ("gains.ki", self.ki), ("gains.kd", self.kd)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Horizontal field of view and image width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraGeometry {
    pub hfov: f64,
    pub width: usize,
}

impl Default for CameraGeometry {
    fn default() -> Self {
        Self { hfov: 60.0, width: 640 }
    }
}

impl CameraGeometry {
    pub fn new(hfov: f64, width: usize) -> Result<Self> {
        let g = Self { hfov, width };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hfov > 0.0) {
            return Err(Error::param("geometry.hfov", format!("must be > 0, got {}", self.hfov)));
        }
        if self.width < 2 {
            return Err(Error::param("geometry.width", format!("must be >= 2, got {}", self.width)));
        }
        Ok(())
    }

    /// Pixel column of the optical axis.
    pub fn center_x(&self) -> f64 {
        self.width as f64 / 2.0
    }

    pub fn pixels_per_degree(&self) -> f64 {
        self.width as f64 / self.hfov
    }
}

/// Signed horizontal error, positive when the target is right of centre.
pub fn pixel_error(x_target: f64, x_center: f64) -> f64 {
    x_target - x_center
}

pub fn error_to_degrees(e: f64, geom: &CameraGeometry) -> f64 {
    e * geom.hfov / geom.width as f64
}

/// Mechanical limits and start angle of the pan axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServoLimits {
    pub initial_theta: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Integral bound in pixel-seconds; derived from the angle limits when absent.
    pub e_sum_limit: Option<f64>,
}

impl Default for ServoLimits {
    fn default() -> Self {
        Self {
            initial_theta: 0.0,
            theta_min: -90.0,
            theta_max: 90.0,
            e_sum_limit: None,
        }
    }
}

/// Controller memory plus its limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ServoState {
    theta: f64,
    e_prev: f64,
    e_sum: f64,
    theta_min: f64,
    theta_max: f64,
    e_sum_limit: f64,
}

impl ServoState {
    /// Fresh state at angle `theta`. Without an explicit `e_sum_limit` the
    /// integral is bounded at the value that alone would command the larger
    /// angle limit.
    pub fn new(theta: f64, theta_min: f64, theta_max: f64, e_sum_limit: Option<f64>, gains: &PidGains) -> Result<Self> {
        if !(theta_min <= theta_max) {
            return Err(Error::param("servo.theta_min", format!("{theta_min} exceeds theta_max {theta_max}")));
        }
        if !(theta_min..=theta_max).contains(&theta) {
            return Err(Error::param(
                "servo.initial_theta",
                format!("{theta} outside [{theta_min}, {theta_max}]"),
            ));
        }
        let e_sum_limit = match e_sum_limit {
            Some(l) if l >= 0.0 => l,
            Some(l) => return Err(Error::param("servo.e_sum_limit", format!("must be >= 0, got {l}"))),
            None if gains.ki != 0.0 => theta_min.abs().max(theta_max.abs()) / gains.ki.abs(),
            None => f64::INFINITY,
        };
        Ok(Self {
            theta,
            e_prev: 0.0,
            e_sum: 0.0,
            theta_min,
            theta_max,
            e_sum_limit,
        })
    }

    pub fn from_limits(limits: &ServoLimits, gains: &PidGains) -> Result<Self> {
        Self::new(limits.initial_theta, limits.theta_min, limits.theta_max, limits.e_sum_limit, gains)
    }

    /// State at 0 degrees with limits of +-90 degrees.
    pub fn centered(gains: &PidGains) -> Self {
        Self::new(0.0, -90.0, 90.0, None, gains).expect("default limits are valid")
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn e_prev(&self) -> f64 {
        self.e_prev
    }

    pub fn e_sum(&self) -> f64 {
        self.e_sum
    }

    pub fn limits(&self) -> (f64, f64) {
        (self.theta_min, self.theta_max)
    }

    pub fn e_sum_limit(&self) -> f64 {
        self.e_sum_limit
    }
}

/// One controller update for error `e` (pixels); returns the new angle.
pub fn pid_step(state: &mut ServoState, gains: &PidGains, e: f64) -> f64 {
    state.e_sum = (state.e_sum + e * gains.dt).clamp(-state.e_sum_limit, state.e_sum_limit);
    let e_diff = (e - state.e_prev) / gains.dt;
    let theta = state.theta + gains.kp * e + gains.ki * state.e_sum + gains.kd * e_diff;
    // NaN would slip through `clamp`; hold the angle instead.
    let theta = if theta.is_nan() { state.theta } else { theta.clamp(state.theta_min, state.theta_max) };
    state.e_prev = e;
    state.theta = theta;
    theta
}

/// Missed detection: keep pointing where we were.
pub fn hold_on_miss(state: &ServoState) -> f64 {
    state.theta
}
