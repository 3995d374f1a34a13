//! Binary Netpbm (P5/P6) reading and writing.
//!
//! Thermal frames are P5 with two-byte big-endian samples; visible frames are
//! P6. Outputs use maxval 255 for colour and 65535 for greyscale maps.

use std::fs;
use std::path::Path;

use nightfusion::{GrayImage, RgbImage, ThermalFrame};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PnmError {
    #[error("{source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    /// A greyscale image with one-byte samples where counts were expected.
    #[error("expected 16-bit thermal image (maxval {0})")]
    NotSixteenBit(u16),
}

/// Decoded raster with raw samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pnm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub channels: usize,
    pub samples: Vec<u16>,
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, PnmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PnmError::Format(format!("bad {what} in header")))
    }
}

pub fn decode(bytes: &[u8]) -> Result<Pnm, PnmError> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        _ => return Err(PnmError::Format("not a binary PGM/PPM (P5/P6) file".into())),
    };
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PnmError::Format(format!("invalid dimensions {width}x{height}")));
    }
    if !(1..=65535).contains(&maxval) {
        return Err(PnmError::Format(format!("maxval {maxval} outside 1..=65535")));
    }
    match bytes.get(h.pos) {
        Some(c) if c.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(PnmError::Format("missing whitespace after maxval".into())),
    }
    let n = width * height * channels;
    let wide = maxval > 255;
    let need = if wide { 2 * n } else { n };
    let raster = bytes
        .get(h.pos..h.pos + need)
        .ok_or_else(|| PnmError::Format(format!("raster truncated: need {need} bytes, have {}", bytes.len() - h.pos)))?;
    let samples: Vec<u16> = if wide {
        raster.chunks_exact(2).map(|b| u16::from_be_bytes([b[0], b[1]])).collect()
    } else {
        raster.iter().map(|&b| u16::from(b)).collect()
    };
    if let Some(&bad) = samples.iter().find(|&&s| s > maxval as u16) {
        return Err(PnmError::Format(format!("sample {bad} exceeds maxval {maxval}")));
    }
    Ok(Pnm {
        width,
        height,
        maxval: maxval as u16,
        channels,
        samples,
    })
}

pub fn encode(img: &Pnm) -> Vec<u8> {
    let magic = if img.channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    if img.maxval > 255 {
        out.reserve(2 * img.samples.len());
        for s in &img.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(img.samples.iter().map(|&s| s as u8));
    }
    out
}

fn read_file(path: &Path) -> Result<Pnm, PnmError> {
    let bytes = fs::read(path).map_err(|source| PnmError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}

fn write_file(path: &Path, img: &Pnm) -> Result<(), PnmError> {
    fs::write(path, encode(img)).map_err(|source| PnmError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn quantize(v: f64, maxval: u16) -> u16 {
    (v.clamp(0.0, 1.0) * f64::from(maxval)).round() as u16
}

pub fn thermal_from_pnm(img: Pnm) -> Result<ThermalFrame, PnmError> {
    if img.channels != 1 {
        return Err(PnmError::Format("expected a greyscale (P5) thermal image".into()));
    }
    if img.maxval <= 255 {
        return Err(PnmError::NotSixteenBit(img.maxval));
    }
    ThermalFrame::new(img.width, img.height, img.samples).map_err(|e| PnmError::Format(e.to_string()))
}

pub fn thermal_to_pnm(frame: &ThermalFrame) -> Pnm {
    Pnm {
        width: frame.width(),
        height: frame.height(),
        maxval: 65535,
        channels: 1,
        samples: frame.counts().to_vec(),
    }
}

/// Visible frame scaled to [0, 1] by its maxval.
pub fn rgb_from_pnm(img: Pnm) -> Result<RgbImage, PnmError> {
    if img.channels != 3 {
        return Err(PnmError::Format("expected a colour (P6) image".into()));
    }
    let scale = f64::from(img.maxval);
    let data = img.samples.iter().map(|&s| f64::from(s) / scale).collect();
    RgbImage::new(img.width, img.height, data).map_err(|e| PnmError::Format(e.to_string()))
}

/// 8-bit P6, samples quantised as `round(v * 255)`.
pub fn rgb_to_pnm(img: &RgbImage) -> Pnm {
    Pnm {
        width: img.width(),
        height: img.height(),
        maxval: 255,
        channels: 3,
        samples: img.data().iter().map(|&v| quantize(v, 255)).collect(),
    }
}

/// 16-bit P5, samples quantised as `round(v * 65535)`.
pub fn gray_to_pnm16(img: &GrayImage) -> Pnm {
    Pnm {
        width: img.width(),
        height: img.height(),
        maxval: 65535,
        channels: 1,
        samples: img.data().iter().map(|&v| quantize(v, 65535)).collect(),
    }
}

pub fn read_thermal(path: &Path) -> Result<ThermalFrame, PnmError> {
    thermal_from_pnm(read_file(path)?)
}

pub fn read_rgb(path: &Path) -> Result<RgbImage, PnmError> {
    rgb_from_pnm(read_file(path)?)
}

pub fn write_thermal(path: &Path, frame: &ThermalFrame) -> Result<(), PnmError> {
    write_file(path, &thermal_to_pnm(frame))
}

pub fn write_rgb(path: &Path, img: &RgbImage) -> Result<(), PnmError> {
    write_file(path, &rgb_to_pnm(img))
}

pub fn write_gray16(path: &Path, img: &GrayImage) -> Result<(), PnmError> {
    write_file(path, &gray_to_pnm16(img))
}

pub fn write_pnm(path: &Path, img: &Pnm) -> Result<(), PnmError> {
    write_file(path, img)
}
