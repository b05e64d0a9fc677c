//! rg chromaticity of colour-checker patches.

use crate::error::{Error, Result};
use crate::metrics::region::{trimmed_mean, RegionMask};
use crate::raster::Image;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chromaticity {
    pub r: f64,
    pub g: f64,
    /// Set when the source triple was black and the gray point was substituted.
    pub from_black: bool,
}

impl Chromaticity {
    pub fn new(r: f64, g: f64) -> Self {
        Self {
            r,
            g,
            from_black: false,
        }
    }

    pub fn distance(&self, other: &Chromaticity) -> f64 {
        (self.r - other.r).hypot(self.g - other.g)
    }
}

pub fn rg_chromaticity(rgb: [f64; 3]) -> Chromaticity {
    let sum = rgb[0] + rgb[1] + rgb[2];
    if sum <= 0.0 {
        return Chromaticity {
            r: 1.0 / 3.0,
            g: 1.0 / 3.0,
            from_black: true,
        };
    }
    Chromaticity::new(rgb[0] / sum, rgb[1] / sum)
}

/// Per-channel trimmed means over the mask, then the rg ratio.
pub fn patch_chromaticity(image: &Image, mask: &RegionMask, trim_fraction: f64) -> Result<Chromaticity> {
    let idx = mask.indices(image.width(), image.height())?;
    let mut rgb = [0.0; 3];
    for (c, slot) in rgb.iter_mut().enumerate() {
        let values: Vec<f64> = idx.iter().map(|&i| image.data()[i * 3 + c]).collect();
        *slot = trimmed_mean(&values, trim_fraction)?;
    }
    Ok(rg_chromaticity(rgb))
}

pub fn mean_chromaticity_distance(
    test: &Image,
    reference: &Image,
    masks: &[RegionMask],
    trim_fraction: f64,
) -> Result<f64> {
    if masks.is_empty() {
        return Err(Error::Param("no patches for chromaticity distance".into()));
    }
    let mut total = 0.0;
    for m in masks {
        let a = patch_chromaticity(test, m, trim_fraction)?;
        let b = patch_chromaticity(reference, m, trim_fraction)?;
        total += a.distance(&b);
    }
    Ok(total / masks.len() as f64)
}
