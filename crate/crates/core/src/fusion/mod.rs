//! Thermal-guided low-light enhancement.
//!
//! Per frame: the thermal counts are normalised and resized to the visible
//! resolution, percentile-stretched and gamma-shaped into an illumination
//! proxy, Gaussian-smoothed, refined against the visible luma, temporally
//! smoothed, and finally used as a per-pixel gain on the visible frame
//! (`G = alpha + beta * L_hat`). Unsharp masking and optional CLAHE on luma
//! finish the frame.

mod clahe;
mod config;
mod guided;
mod refine;

pub use clahe::clahe;
pub use config::FusionConfig;
pub use guided::{fast_guided_filter, guided_coefficients, guided_filter};
pub use refine::{ExactGuided, FastGuided, Refiner, RefinerFactory, RefinerRegistry};

use crate::color::{luminance, rgb_to_ycbcr, ycbcr_to_rgb};
use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::image::{ensure_same_dims, lerp, resize_bilinear, stretch, GrayImage, RgbImage, ThermalFrame};

/// Temporal memory of one stream.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FusionState {
    pub l_hat: Option<GrayImage>,
    pub frame_index: u64,
}

impl FusionState {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Output of one pipeline step.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedFrame {
    pub fused: RgbImage,
    /// The temporally smoothed illumination map used for the gain.
    pub l_hat: GrayImage,
}

/// Stretch, gamma and Gaussian smoothing of a [0, 1] thermal plane that is
/// already at the visible resolution.
pub fn illumination_proxy(thermal: &GrayImage, cfg: &FusionConfig) -> Result<GrayImage> {
    let stretched = stretch(thermal, cfg.p_low, cfg.p_high)?;
    let gamma = cfg.gamma;
    gaussian_blur(&stretched.map(|v| v.powf(gamma)), cfg.gauss_k)
}

/// Exponential moving average of the refined proxy.
///
/// The first frame initialises the average to `l_tilde`. The update is
/// evaluated as `prev + (1 - a) * (l_tilde - prev)` and clamped to the
/// segment between the two inputs, so repeated frames are an exact fixed
/// point and the result never leaves the convex hull of its history.
pub fn ema_update(state: &mut FusionState, l_tilde: &GrayImage, a: f64) -> Result<GrayImage> {
    if !(0.0..=0.98).contains(&a) {
        return Err(Error::param("a", format!("smoothing factor must lie in [0, 0.98], got {a}")));
    }
    let next = match &state.l_hat {
        Some(prev) => {
            ensure_same_dims(prev.dims(), l_tilde.dims())?;
            if a == 0.0 {
                l_tilde.clone()
            } else {
                let t = 1.0 - a;
                prev.zip_map(l_tilde, |p, l| lerp(p, l, t).clamp(p.min(l), p.max(l)))?
            }
        }
        None => l_tilde.clone(),
    };
    state.l_hat = Some(next.clone());
    state.frame_index += 1;
    Ok(next)
}

/// Multiplies every channel by `alpha + beta * l_hat` and clips to [0, 1].
pub fn gain_modulate(rgb: &RgbImage, l_hat: &GrayImage, alpha: f64, beta: f64) -> Result<RgbImage> {
    ensure_same_dims(rgb.dims(), l_hat.dims())?;
    let data = rgb
        .data()
        .chunks_exact(3)
        .zip(l_hat.data())
        .flat_map(|(px, &l)| {
            let gain = alpha + beta * l;
            [px[0], px[1], px[2]].map(|v| (v * gain).clamp(0.0, 1.0))
        })
        .collect();
    RgbImage::new(rgb.width(), rgb.height(), data)
}

/// Per-channel `clip(I + strength * (I - blur(I, k)))`.
pub fn unsharp_mask(rgb: &RgbImage, strength: f64, k: usize) -> Result<RgbImage> {
    if !(strength >= 0.0) {
        return Err(Error::param("strength", format!("must be >= 0, got {strength}")));
    }
    if strength == 0.0 {
        crate::filter::gaussian_kernel(k)?;
        return Ok(rgb.clone());
    }
    let planes = rgb.planes();
    let mut sharpened = Vec::with_capacity(3);
    for plane in &planes {
        let blurred = gaussian_blur(plane, k)?;
        sharpened.push(plane.zip_map(&blurred, |v, b| (v + strength * (v - b)).clamp(0.0, 1.0))?);
    }
    RgbImage::from_planes(&sharpened[0], &sharpened[1], &sharpened[2])
}

/// A configured pipeline with its refinement strategy resolved.
pub struct FusionPipeline {
    cfg: FusionConfig,
    refiner: Box<dyn Refiner>,
}

impl FusionPipeline {
    /// Validates `cfg` and builds the refiner named by `cfg.guided_mode`.
    pub fn new(cfg: FusionConfig, registry: &RefinerRegistry) -> Result<Self> {
        cfg.validate()?;
        let refiner = registry.build(&cfg.guided_mode, &cfg)?;
        Ok(Self { cfg, refiner })
    }

    pub fn with_builtin(cfg: FusionConfig) -> Result<Self> {
        Self::new(cfg, &RefinerRegistry::builtin())
    }

    pub fn config(&self) -> &FusionConfig {
        &self.cfg
    }

    pub fn refiner(&self) -> &dyn Refiner {
        self.refiner.as_ref()
    }

    /// Runs one frame through the pipeline, advancing `state`.
    pub fn process(&self, rgb: &RgbImage, thermal: &ThermalFrame, state: &mut FusionState) -> Result<FusedFrame> {
        let cfg = &self.cfg;
        let (w, h) = rgb.dims();
        let t01 = resize_bilinear(&thermal.normalized(), w, h)?;
        let proxy = illumination_proxy(&t01, cfg)?;
        let guide = luminance(rgb);
        let l_tilde = self.refiner.refine(&proxy, &guide)?.map(|v| v.clamp(0.0, 1.0));
        let l_hat = ema_update(state, &l_tilde, cfg.ema_a)?;
        let mut fused = gain_modulate(rgb, &l_hat, cfg.alpha, cfg.beta)?;
        fused = unsharp_mask(&fused, cfg.unsharp_strength, cfg.unsharp_k)?;
        if cfg.clahe_enabled {
            let [y, cb, cr] = rgb_to_ycbcr(&fused);
            let y = clahe(&y, cfg.clahe_clip, cfg.clahe_grid)?;
            fused = ycbcr_to_rgb(&y, &cb, &cr)?;
        }
        Ok(FusedFrame { fused, l_hat })
    }
}

impl std::fmt::Debug for FusionPipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FusionPipeline")
            .field("cfg", &self.cfg)
            .field("refiner", &self.refiner.name())
            .finish()
    }
}

/// One-shot form of [`FusionPipeline::process`] using the builtin refiners.
pub fn fuse_frame(rgb: &RgbImage, thermal: &ThermalFrame, cfg: &FusionConfig, state: &mut FusionState) -> Result<FusedFrame> {
    FusionPipeline::with_builtin(cfg.clone())?.process(rgb, thermal, state)
}
