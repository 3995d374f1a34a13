//! Guided filter and its subsampled approximation.

use crate::error::{Error, Result};
use crate::filter::box_filter;
use crate::image::{ensure_same_dims, resize_bilinear, GrayImage};

/// Window-averaged linear coefficients `(mean_a, mean_b)` such that the
/// filtered output is `mean_a * guide + mean_b`.
pub fn guided_coefficients(p: &GrayImage, guide: &GrayImage, r: usize, eps: f64) -> Result<(GrayImage, GrayImage)> {
    ensure_same_dims(p.dims(), guide.dims())?;
    if !(eps > 0.0) {
        return Err(Error::param("eps", format!("must be > 0, got {eps}")));
    }
    // Moments are taken on samples offset by the first pixel, which leaves a
    // constant guide with exactly zero variance.
    let g0 = guide.data()[0];
    let p0 = p.data()[0];
    let gc = guide.map(|v| v - g0);
    let pc = p.map(|v| v - p0);

    let mean_guide = box_filter(guide, r);
    let mean_p = box_filter(p, r);
    let mean_gc = box_filter(&gc, r);
    let mean_pc = box_filter(&pc, r);
    let mean_gp = box_filter(&gc.zip_map(&pc, |a, b| a * b)?, r);
    let mean_gg = box_filter(&gc.map(|v| v * v), r);

    let n = p.data().len();
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for i in 0..n {
        let mgc = mean_gc.data()[i];
        let cov = mean_gp.data()[i] - mgc * mean_pc.data()[i];
        let var = mean_gg.data()[i] - mgc * mgc;
        let ai = cov / (var + eps);
        a.push(ai);
        b.push(mean_p.data()[i] - ai * mean_guide.data()[i]);
    }
    let (w, h) = p.dims();
    let a = GrayImage::new(w, h, a)?;
    let b = GrayImage::new(w, h, b)?;
    Ok((box_filter(&a, r), box_filter(&b, r)))
}

fn compose(a: &GrayImage, b: &GrayImage, guide: &GrayImage) -> Result<GrayImage> {
    let data = a
        .data()
        .iter()
        .zip(b.data())
        .zip(guide.data())
        .map(|((&a, &b), &g)| a * g + b)
        .collect();
    GrayImage::new(guide.width(), guide.height(), data)
}

/// Edge-preserving smoothing of `p` steered by `guide` over radius-`r` windows.
pub fn guided_filter(p: &GrayImage, guide: &GrayImage, r: usize, eps: f64) -> Result<GrayImage> {
    let (a, b) = guided_coefficients(p, guide, r, eps)?;
    compose(&a, &b, guide)
}

/// Guided filter evaluated at `1/s` resolution; the coefficient maps are
/// upsampled bilinearly and applied to the full-resolution guide.
pub fn fast_guided_filter(p: &GrayImage, guide: &GrayImage, r: usize, eps: f64, s: usize) -> Result<GrayImage> {
    ensure_same_dims(p.dims(), guide.dims())?;
    if s == 0 {
        return Err(Error::param("s", "subsample factor must be >= 1"));
    }
    if s == 1 {
        return guided_filter(p, guide, r, eps);
    }
    let (w, h) = p.dims();
    let (lw, lh) = (w.div_ceil(s), h.div_ceil(s));
    let p_low = resize_bilinear(p, lw, lh)?;
    let g_low = resize_bilinear(guide, lw, lh)?;
    let (a, b) = guided_coefficients(&p_low, &g_low, (r / s).max(1), eps)?;
    let a = resize_bilinear(&a, w, h)?;
    let b = resize_bilinear(&b, w, h)?;
    compose(&a, &b, guide)
}
