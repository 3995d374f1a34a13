//! Radiometric count to temperature conversion.
//!
//! Counts are taken to be hundredths of a kelvin (centikelvin), the
//! convention of common radiometric LWIR cores. Emissivity is not modelled.

use crate::error::{Error, Result};
use crate::image::ThermalFrame;

/// Kelvin-to-Celsius offset expressed in counts.
const ZERO_CELSIUS_COUNTS: i32 = 27315;

/// Degrees Celsius for one centikelvin count.
pub fn raw_to_celsius(count: u16) -> f64 {
    f64::from(i32::from(count) - ZERO_CELSIUS_COUNTS) / 100.0
}

/// Temperature at pixel `(x, y)`; signed coordinates so callers can pass
/// user input straight through.
pub fn query_pixel(frame: &ThermalFrame, x: i64, y: i64) -> Result<f64> {
    let (w, h) = (frame.width(), frame.height());
    let oob = |axis, value| Error::OutOfBounds { axis, value, width: w, height: h };
    if x < 0 || x as u64 >= w as u64 {
        return Err(oob('x', x));
    }
    if y < 0 || y as u64 >= h as u64 {
        return Err(oob('y', y));
    }
    Ok(raw_to_celsius(frame.counts()[y as usize * w + x as usize]))
}
