//! BT.601 full-range luma/chroma conversion.

use crate::error::Result;
use crate::image::{GrayImage, RgbImage};

const KR: f64 = 0.299;
const KG: f64 = 0.587;
const KB: f64 = 0.114;
const CB_SCALE: f64 = 0.564;
const CR_SCALE: f64 = 0.713;

#[inline]
pub fn luma(r: f64, g: f64, b: f64) -> f64 {
    KR * r + KG * g + KB * b
}

/// Splits an RGB image into Y, Cb and Cr planes.
pub fn rgb_to_ycbcr(img: &RgbImage) -> [GrayImage; 3] {
    let [r, g, b] = img.planes();
    let n = r.data().len();
    let (mut y, mut cb, mut cr) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for ((&rv, &gv), &bv) in r.data().iter().zip(g.data()).zip(b.data()) {
        let l = luma(rv, gv, bv);
        y.push(l);
        cb.push(0.5 + (bv - l) * CB_SCALE);
        cr.push(0.5 + (rv - l) * CR_SCALE);
    }
    let (w, h) = img.dims();
    [y, cb, cr].map(|d| GrayImage::new(w, h, d).expect("plane size"))
}

/// Luma plane only.
pub fn luminance(img: &RgbImage) -> GrayImage {
    let data = img.data().chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect();
    GrayImage::new(img.width(), img.height(), data).expect("plane size")
}

/// Exact algebraic inverse of [`rgb_to_ycbcr`], clipped to [0, 1].
pub fn ycbcr_to_rgb(y: &GrayImage, cb: &GrayImage, cr: &GrayImage) -> Result<RgbImage> {
    crate::image::ensure_same_dims(y.dims(), cb.dims())?;
    crate::image::ensure_same_dims(y.dims(), cr.dims())?;
    let mut data = Vec::with_capacity(3 * y.data().len());
    for ((&l, &u), &v) in y.data().iter().zip(cb.data()).zip(cr.data()) {
        let b = l + (u - 0.5) / CB_SCALE;
        let r = l + (v - 0.5) / CR_SCALE;
        let g = (l - KR * r - KB * b) / KG;
        data.extend_from_slice(&[r.clamp(0.0, 1.0), g.clamp(0.0, 1.0), b.clamp(0.0, 1.0)]);
    }
    RgbImage::new(y.width(), y.height(), data)
}
