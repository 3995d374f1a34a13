//! Floating-point rasters and the geometric/intensity operators on them.

use crate::error::{Error, Result};
use crate::order_stat;

/// Stretch ranges narrower than this collapse to a neutral 0.5 image.
pub const DEGENERATE_RANGE: f64 = 1e-6;

/// Single-channel raster, row-major, nominal range [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

/// Interleaved RGB raster, row-major, nominal range [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

/// Raw 16-bit radiometric counts, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThermalFrame {
    width: usize,
    height: usize,
    counts: Vec<u16>,
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions { width, height });
    }
    Ok(())
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::BufferLength { expected, actual });
    }
    Ok(())
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left_w: a.0,
            left_h: a.1,
            right_w: b.0,
            right_h: b.1,
        });
    }
    Ok(())
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        check_len(width * height, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(width, height)?;
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Ok(Self { width, height, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Applies `f` to every sample.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Combines two same-sized images sample by sample.
    pub fn zip_map(&self, other: &GrayImage, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_dims(self.dims(), other.dims())?;
        Ok(Self {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}

impl RgbImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(width, height)?;
        check_len(3 * width * height, data.len())?;
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self> {
        check_dims(width, height)?;
        let data = rgb.iter().copied().cycle().take(3 * width * height).collect();
        Ok(Self { width, height, data })
    }

    /// Interleaves three planes into one image.
    pub fn from_planes(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<Self> {
        ensure_same_dims(r.dims(), g.dims())?;
        ensure_same_dims(r.dims(), b.dims())?;
        let mut data = Vec::with_capacity(3 * r.data.len());
        for ((&rv, &gv), &bv) in r.data.iter().zip(&g.data).zip(&b.data) {
            data.extend_from_slice(&[rv, gv, bv]);
        }
        Ok(Self {
            width: r.width,
            height: r.height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Splits into R, G and B planes.
    pub fn planes(&self) -> [GrayImage; 3] {
        let n = self.width * self.height;
        let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for px in self.data.chunks_exact(3) {
            for (plane, &v) in planes.iter_mut().zip(px) {
                plane.push(v);
            }
        }
        planes.map(|data| GrayImage {
            width: self.width,
            height: self.height,
            data,
        })
    }
}

impl ThermalFrame {
    pub fn new(width: usize, height: usize, counts: Vec<u16>) -> Result<Self> {
        check_dims(width, height)?;
        check_len(width * height, counts.len())?;
        Ok(Self { width, height, counts })
    }

    pub fn filled(width: usize, height: usize, count: u16) -> Result<Self> {
        Self::new(width, height, vec![count; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn counts(&self) -> &[u16] {
        &self.counts
    }

    /// Counts scaled to [0, 1] by the full 16-bit range.
    pub fn normalized(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.counts.iter().map(|&c| f64::from(c) / 65535.0).collect(),
        }
    }
}

/// Linearly interpolated order statistic of all samples, `p` in [0, 100].
pub fn percentile(img: &GrayImage, p: f64) -> Result<f64> {
    let mut samples = img.data.clone();
    order_stat::select_interpolated(&mut samples, p)
}

/// Robust min-max normalisation between two percentiles, clipped to [0, 1].
///
/// A flat input (percentile range below [`DEGENERATE_RANGE`]) yields a
/// constant 0.5 image.
pub fn stretch(img: &GrayImage, p_low: f64, p_high: f64) -> Result<GrayImage> {
    if !(0.0..=100.0).contains(&p_low) || !(0.0..=100.0).contains(&p_high) || p_low >= p_high {
        return Err(Error::param(
            "p_low/p_high",
            format!("need 0 <= p_low < p_high <= 100, got ({p_low}, {p_high})"),
        ));
    }
    let mut samples = img.data.clone();
    let lo = order_stat::select_interpolated(&mut samples, p_low)?;
    let hi = order_stat::select_interpolated(&mut samples, p_high)?;
    let range = hi - lo;
    if range < DEGENERATE_RANGE {
        return Ok(img.map(|_| 0.5));
    }
    Ok(img.map(|v| ((v - lo) / range).clamp(0.0, 1.0)))
}

/// Per-axis sampling plan: for every output index, the two source indices and
/// the weight of the second.
pub(crate) fn bilinear_taps(n_in: usize, n_out: usize) -> Vec<(usize, usize, f64)> {
    let scale = n_in as f64 / n_out as f64;
    let last = (n_in - 1) as f64;
    (0..n_out)
        .map(|i| {
            let src = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, last);
            let i0 = src.floor() as usize;
            let i1 = (i0 + 1).min(n_in - 1);
            (i0, i1, src - i0 as f64)
        })
        .collect()
}

#[inline]
pub(crate) fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + t * (b - a)
}

/// Bilinear resampling with half-pixel-centre alignment; source coordinates
/// are clamped to the image.
pub fn resize_bilinear(img: &GrayImage, out_w: usize, out_h: usize) -> Result<GrayImage> {
    check_dims(out_w, out_h)?;
    if (out_w, out_h) == img.dims() {
        return Ok(img.clone());
    }
    let xs = bilinear_taps(img.width, out_w);
    let ys = bilinear_taps(img.height, out_h);
    let mut data = Vec::with_capacity(out_w * out_h);
    for &(y0, y1, ty) in &ys {
        let r0 = &img.data[y0 * img.width..(y0 + 1) * img.width];
        let r1 = &img.data[y1 * img.width..(y1 + 1) * img.width];
        for &(x0, x1, tx) in &xs {
            let top = lerp(r0[x0], r0[x1], tx);
            let bottom = lerp(r1[x0], r1[x1], tx);
            data.push(lerp(top, bottom, ty));
        }
    }
    Ok(GrayImage {
        width: out_w,
        height: out_h,
        data,
    })
}
