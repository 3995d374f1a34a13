use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Every tunable of the fusion pipeline. Defaults are the published operating
/// point; the guided-filter settings are conventional choices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub p_low: f64,
    pub p_high: f64,
    pub gamma: f64,
    pub ema_a: f64,
    pub gauss_k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub unsharp_strength: f64,
    pub unsharp_k: usize,
    pub clahe_enabled: bool,
    pub clahe_clip: f64,
    /// Tiles per axis as `[columns, rows]`.
    pub clahe_grid: [usize; 2],
    pub guided_radius: usize,
    pub guided_eps: f64,
    pub guided_fast_subsample: usize,
    /// Name of a registered [`super::Refiner`], `"exact"` or `"fast"` by default.
    pub guided_mode: String,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            p_low: 2.0,
            p_high: 98.0,
            gamma: 0.7,
            ema_a: 0.9,
            gauss_k: 7,
            alpha: 0.7,
            beta: 1.6,
            unsharp_strength: 0.5,
            unsharp_k: 5,
            clahe_enabled: true,
            clahe_clip: 2.0,
            clahe_grid: [8, 8],
            guided_radius: 8,
            guided_eps: 0.01,
            guided_fast_subsample: 4,
            guided_mode: "exact".to_string(),
        }
    }
}

impl FusionConfig {
    /// Config with every enhancement stage neutral: the pipeline becomes the
    /// identity on the visible frame.
    pub fn neutral() -> Self {
        Self {
            alpha: 1.0,
            beta: 0.0,
            unsharp_strength: 0.0,
            clahe_enabled: false,
            ..Self::default()
        }
    }

    /// Checks value ranges. Errors name the offending field.
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, reason: String| Err(Error::param(format!("fusion.{name}"), reason));
        if !(0.0..=100.0).contains(&self.p_low) || !(0.0..=100.0).contains(&self.p_high) || self.p_low >= self.p_high {
            return bad("p_low", format!("need 0 <= p_low < p_high <= 100, got ({}, {})", self.p_low, self.p_high));
        }
        if !(self.gamma > 0.0) {
            return bad("gamma", format!("must be > 0, got {}", self.gamma));
        }
        if !(0.0..=0.98).contains(&self.ema_a) {
            return bad("ema_a", format!("must lie in [0, 0.98], got {}", self.ema_a));
        }
        if self.gauss_k % 2 == 0 {
            return bad("gauss_k", format!("must be odd, got {}", self.gauss_k));
        }
        if !(self.alpha >= 0.0) {
            return bad("alpha", format!("must be >= 0, got {}", self.alpha));
        }
        if !(self.beta >= 0.0) {
            return bad("beta", format!("must be >= 0, got {}", self.beta));
        }
        if !(self.unsharp_strength >= 0.0) {
            return bad("unsharp_strength", format!("must be >= 0, got {}", self.unsharp_strength));
        }
        if self.unsharp_k % 2 == 0 {
            return bad("unsharp_k", format!("must be odd, got {}", self.unsharp_k));
        }
        if !(self.clahe_clip > 0.0) {
            return bad("clahe_clip", format!("must be > 0, got {}", self.clahe_clip));
        }
        if self.clahe_grid.contains(&0) {
            return bad("clahe_grid", "tile counts must be >= 1".to_string());
        }
        if !(self.guided_eps > 0.0) {
            return bad("guided_eps", format!("must be > 0, got {}", self.guided_eps));
        }
        if self.guided_fast_subsample == 0 {
            return bad("guided_fast_subsample", "must be >= 1".to_string());
        }
        Ok(())
    }
}
