//! Contrast-limited adaptive histogram equalisation on a [0, 1] plane.

use crate::error::{Error, Result};
use crate::image::{lerp, GrayImage};

const BINS: usize = 256;

#[inline]
fn bin_of(v: f64) -> usize {
    (v.clamp(0.0, 1.0) * 255.0).round() as usize
}

/// Grey-level mapping of one tile.
///
/// Bins are clipped at `clip_factor` times the mean bin height and the excess
/// is spread evenly over all bins before taking the cumulative histogram. A
/// tile whose samples all fall in one bin has no contrast to redistribute and
/// maps to itself.
fn tile_mapping(hist: &[u32; BINS], clip_factor: f64) -> [f64; BINS] {
    let total: u32 = hist.iter().sum();
    let mut map = [0.0; BINS];
    let occupied = hist.iter().filter(|&&c| c > 0).count();
    if occupied <= 1 {
        for (b, m) in map.iter_mut().enumerate() {
            *m = b as f64 / 255.0;
        }
        return map;
    }
    let total = f64::from(total);
    let limit = clip_factor * total / BINS as f64;
    let mut clipped = [0.0; BINS];
    let mut excess = 0.0;
    for (c, &h) in clipped.iter_mut().zip(hist) {
        let h = f64::from(h);
        if h > limit {
            excess += h - limit;
            *c = limit;
        } else {
            *c = h;
        }
    }
    let share = excess / BINS as f64;
    let mut cdf = 0.0;
    for (m, c) in map.iter_mut().zip(clipped) {
        cdf += c + share;
        *m = (cdf / total).min(1.0);
    }
    map
}

/// Tile edges along one axis: `tiles + 1` boundaries covering `0..n`.
fn tile_edges(n: usize, tiles: usize) -> Vec<usize> {
    (0..=tiles).map(|i| i * n / tiles).collect()
}

/// For each pixel along an axis: the two neighbouring tiles and the weight of
/// the second, interpolating between tile centres (clamped at the edges).
fn axis_weights(n: usize, edges: &[usize]) -> Vec<(usize, usize, f64)> {
    let centres: Vec<f64> = edges.windows(2).map(|e| (e[0] + e[1]) as f64 / 2.0 - 0.5).collect();
    let last = centres.len() - 1;
    (0..n)
        .map(|p| {
            let x = p as f64;
            if x <= centres[0] {
                return (0, 0, 0.0);
            }
            if x >= centres[last] {
                return (last, last, 0.0);
            }
            let i = centres.partition_point(|&c| c <= x) - 1;
            (i, i + 1, (x - centres[i]) / (centres[i + 1] - centres[i]))
        })
        .collect()
}

/// CLAHE with `grid = [columns, rows]` tiles. Tile counts larger than the
/// image are reduced to one tile per pixel.
pub fn clahe(gray: &GrayImage, clip_factor: f64, grid: [usize; 2]) -> Result<GrayImage> {
    if grid.contains(&0) {
        return Err(Error::param("grid", "tile counts must be >= 1"));
    }
    if !(clip_factor > 0.0) {
        return Err(Error::param("clip_factor", format!("must be > 0, got {clip_factor}")));
    }
    let (w, h) = gray.dims();
    let (tx, ty) = (grid[0].min(w), grid[1].min(h));
    let xe = tile_edges(w, tx);
    let ye = tile_edges(h, ty);
    let bins: Vec<usize> = gray.data().iter().map(|&v| bin_of(v)).collect();

    let mut maps = Vec::with_capacity(tx * ty);
    for j in 0..ty {
        for i in 0..tx {
            let mut hist = [0u32; BINS];
            for y in ye[j]..ye[j + 1] {
                for &b in &bins[y * w + xe[i]..y * w + xe[i + 1]] {
                    hist[b] += 1;
                }
            }
            maps.push(tile_mapping(&hist, clip_factor));
        }
    }

    let xw = axis_weights(w, &xe);
    let yw = axis_weights(h, &ye);
    let mut out = Vec::with_capacity(w * h);
    for (y, &(j0, j1, fy)) in yw.iter().enumerate() {
        for (x, &(i0, i1, fx)) in xw.iter().enumerate() {
            let b = bins[y * w + x];
            let top = lerp(maps[j0 * tx + i0][b], maps[j0 * tx + i1][b], fx);
            let bottom = lerp(maps[j1 * tx + i0][b], maps[j1 * tx + i1][b], fx);
            out.push(lerp(top, bottom, fy).clamp(0.0, 1.0));
        }
    }
    GrayImage::new(w, h, out)
}
