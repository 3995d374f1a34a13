//! Thermal-visible low-light enhancement, single-axis PID pan tracking, and
//! the statistics used to score a tracking run.
//!
//! The crate is organised bottom-up:
//!
//! * [`image`], [`filter`] and [`color`] hold the floating-point raster types
//!   and the primitive operators every fusion stage is built from.
//! * [`fusion`] implements the thermal-guided gain modulation pipeline with a
//!   per-stream temporal state. The edge-aware refinement step is a
//!   [`fusion::Refiner`] strategy picked by name from a [`fusion::RefinerRegistry`].
//! * [`radiometry`] turns 16-bit radiometric counts into degrees Celsius.
//! * [`servo`] is the pan-axis PID law and the pixel/angle conversions.
//! * [`sim`] closes the loop around the controller with a simulated target
//!   and detector; target trajectories are [`sim::MotionModel`] strategies.
//! * [`metrics`] summarises a [`metrics::TrackTrace`].
//!
//! Everything is deterministic: no global state, no wall clock, and all
//! randomness is keyed by an explicit seed.

pub mod color;
pub mod error;
pub mod filter;
pub mod fusion;
pub mod image;
pub mod metrics;
pub mod order_stat;
pub mod radiometry;
pub mod servo;
pub mod sim;

pub use error::{Error, Result};
pub use image::{GrayImage, RgbImage, ThermalFrame};
