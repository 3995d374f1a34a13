//! Edge-aware refinement strategies for the illumination proxy.
//!
//! The pipeline holds a `Box<dyn Refiner>` built by name from a
//! [`RefinerRegistry`]; `FusionConfig::guided_mode` picks the entry.

use std::collections::BTreeMap;

use super::guided::{fast_guided_filter, guided_filter};
use super::FusionConfig;
use crate::error::{Error, Result};
use crate::image::GrayImage;

pub trait Refiner: Send + Sync {
    fn name(&self) -> &'static str;

    /// Refines `proxy` using `guide`, both at the same resolution.
    fn refine(&self, proxy: &GrayImage, guide: &GrayImage) -> Result<GrayImage>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactGuided {
    pub radius: usize,
    pub eps: f64,
}

impl Refiner for ExactGuided {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn refine(&self, proxy: &GrayImage, guide: &GrayImage) -> Result<GrayImage> {
        guided_filter(proxy, guide, self.radius, self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastGuided {
    pub radius: usize,
    pub eps: f64,
    pub subsample: usize,
}

impl Refiner for FastGuided {
    fn name(&self) -> &'static str {
        "fast"
    }

    fn refine(&self, proxy: &GrayImage, guide: &GrayImage) -> Result<GrayImage> {
        fast_guided_filter(proxy, guide, self.radius, self.eps, self.subsample)
    }
}

pub type RefinerFactory = fn(&FusionConfig) -> Box<dyn Refiner>;

/// Name-keyed table of refiner constructors.
#[derive(Clone, Default)]
pub struct RefinerRegistry {
    factories: BTreeMap<String, RefinerFactory>,
}

impl RefinerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding the `exact` and `fast` guided filters.
    pub fn builtin() -> Self {
        let mut reg = Self::new();
        reg.register("exact", |cfg| {
            Box::new(ExactGuided {
                radius: cfg.guided_radius,
                eps: cfg.guided_eps,
            })
        });
        reg.register("fast", |cfg| {
            Box::new(FastGuided {
                radius: cfg.guided_radius,
                eps: cfg.guided_eps,
                subsample: cfg.guided_fast_subsample,
            })
        });
        reg
    }

    /// Adds or replaces the factory stored under `name`.
    pub fn register(&mut self, name: &str, factory: RefinerFactory) {
        self.factories.insert(name.to_string(), factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn build(&self, name: &str, cfg: &FusionConfig) -> Result<Box<dyn Refiner>> {
        let factory = self.factories.get(name).ok_or_else(|| Error::UnknownStrategy {
            kind: "guided_mode",
            name: name.to_string(),
            known: self.names().collect::<Vec<_>>().join(", "),
        })?;
        Ok(factory(cfg))
    }
}

impl std::fmt::Debug for RefinerRegistry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
