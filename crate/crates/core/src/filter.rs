//! Separable spatial filters with replicated borders.
//!
//! Both filters work on samples offset by the image's first value, so a
//! constant image passes through bit-exactly and large flat regions do not
//! accumulate rounding drift.

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Gaussian sigma implied by an odd kernel width.
pub fn sigma_for_width(k: usize) -> f64 {
    0.3 * ((k as f64 - 1.0) / 2.0 - 1.0) + 0.8
}

/// Normalised 1-D Gaussian taps for an odd width `k`.
pub fn gaussian_kernel(k: usize) -> Result<Vec<f64>> {
    if k % 2 == 0 {
        return Err(Error::EvenKernel(k));
    }
    let sigma = sigma_for_width(k);
    let half = (k / 2) as f64;
    let taps: Vec<f64> = (0..k)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let total: f64 = taps.iter().sum();
    Ok(taps.into_iter().map(|t| t / total).collect())
}

fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// Separable Gaussian blur of odd width `k`.
pub fn gaussian_blur(img: &GrayImage, k: usize) -> Result<GrayImage> {
    let kernel = gaussian_kernel(k)?;
    if k == 1 {
        return Ok(img.clone());
    }
    let (w, h) = img.dims();
    let src = img.data();
    let reference = src[0];
    let half = (k / 2) as isize;

    // Horizontal pass over offset samples.
    let mut tmp = vec![0.0; w * h];
    let mut padded = vec![0.0; w + k - 1];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for (i, p) in padded.iter_mut().enumerate() {
            *p = row[clamp_index(i as isize - half, w)] - reference;
        }
        let out = &mut tmp[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            *o = kernel.iter().zip(&padded[x..x + k]).map(|(a, b)| a * b).sum();
        }
    }

    // Vertical pass, accumulating whole rows.
    let mut data = vec![0.0; w * h];
    for y in 0..h {
        let out = &mut data[y * w..(y + 1) * w];
        for (j, &wt) in kernel.iter().enumerate() {
            let sy = clamp_index(y as isize + j as isize - half, h);
            for (o, &v) in out.iter_mut().zip(&tmp[sy * w..(sy + 1) * w]) {
                *o += wt * v;
            }
        }
        for o in out.iter_mut() {
            *o += reference;
        }
    }
    GrayImage::new(w, h, data)
}

/// Mean over the `(2r+1)^2` window around each pixel, computed with running
/// sums so the cost does not depend on `r`.
pub fn box_filter(img: &GrayImage, r: usize) -> GrayImage {
    if r == 0 {
        return img.clone();
    }
    let (w, h) = img.dims();
    let src = img.data();
    let reference = src[0];
    let ri = r as isize;

    // Horizontal window sums.
    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        let at = |i: isize| row[clamp_index(i, w)] - reference;
        let mut acc: f64 = (-ri..=ri).map(at).sum();
        let out = &mut rows[y * w..(y + 1) * w];
        out[0] = acc;
        for x in 1..w as isize {
            acc += at(x + ri) - at(x - ri - 1);
            out[x as usize] = acc;
        }
    }

    // Vertical window sums over whole rows.
    let row_of = |i: isize| {
        let y = clamp_index(i, h);
        &rows[y * w..(y + 1) * w]
    };
    let mut acc = vec![0.0; w];
    for i in -ri..=ri {
        for (a, &v) in acc.iter_mut().zip(row_of(i)) {
            *a += v;
        }
    }
    let area = ((2 * r + 1) * (2 * r + 1)) as f64;
    let mut data = vec![0.0; w * h];
    for y in 0..h as isize {
        if y > 0 {
            let (add, sub) = (row_of(y + ri), row_of(y - ri - 1));
            for ((a, &p), &m) in acc.iter_mut().zip(add).zip(sub) {
                *a += p - m;
            }
        }
        let out = &mut data[y as usize * w..(y as usize + 1) * w];
        for (o, &a) in out.iter_mut().zip(&acc) {
            *o = reference + a / area;
        }
    }
    GrayImage::new(w, h, data).expect("dimensions preserved")
}
