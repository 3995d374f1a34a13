//! Linearly interpolated order statistics shared by the image percentile
//! stretch and the tracking metrics.

use crate::error::{Error, Result};
use std::cmp::Ordering;

/// Fractional rank `p/100 * (n - 1)` split into its integer floor and fraction.
fn rank(n: usize, p: f64) -> (usize, f64) {
    let r = p * (n - 1) as f64 / 100.0;
    let lo = (r.floor() as usize).min(n - 1);
    (lo, r - lo as f64)
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::param("p", format!("percentile {p} outside [0, 100]")));
    }
    Ok(())
}

/// Percentile of an already sorted slice.
pub fn interpolated(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_p(p)?;
    let (lo, frac) = rank(sorted.len(), p);
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Same result as [`interpolated`] on the sorted data, found by selection in
/// linear time. The slice is reordered.
pub fn select_interpolated(samples: &mut [f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_p(p)?;
    let n = samples.len();
    let (lo, frac) = rank(n, p);
    let (_, &mut at, upper) = samples.select_nth_unstable_by(lo, total);
    if frac == 0.0 || upper.is_empty() {
        return Ok(at);
    }
    let next = upper.iter().copied().min_by(total).unwrap_or(at);
    Ok(at + frac * (next - at))
}

fn total(a: &f64, b: &f64) -> Ordering {
    a.total_cmp(b)
}

/// Sorts a copy of `samples` in ascending order.
pub fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_unstable_by(total);
    v
}
