//! Contrast-limited adaptive histogram equalization on luminance.
//!
//! Tiles split the image as evenly as possible (sizes differ by at most one
//! pixel). Each tile gets a clipped histogram and a CDF mapping; pixels
//! bilinearly blend the mappings of the four nearest tile centres, clamping
//! to the outermost centres near the border.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{luma, Image, Plane, LUMA_WEIGHTS};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClaheConfig {
    pub tiles_x: usize,
    pub tiles_y: usize,
    /// Multiple of the uniform bin height at which bins are clipped.
    pub clip_limit: f64,
    pub bins: usize,
}

impl Default for ClaheConfig {
    fn default() -> Self {
        Self {
            tiles_x: 8,
            tiles_y: 8,
            clip_limit: 2.0,
            bins: 256,
        }
    }
}

impl ClaheConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tiles_x < 1 || self.tiles_y < 1 {
            return Err(Error::validation("clahe.tiles", "tile counts must be >= 1"));
        }
        if !(self.clip_limit > 1.0) {
            return Err(Error::validation("clahe.clip_limit", format!("{} must be > 1", self.clip_limit)));
        }
        if self.bins < 2 {
            return Err(Error::validation("clahe.bins", "need at least 2 bins"));
        }
        Ok(())
    }
}

#[inline]
pub fn bin_of(value: f64, bins: usize) -> usize {
    ((value.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1)
}

/// Caps every bin at `limit` and spreads the removed mass evenly over all bins.
pub fn clip_histogram(hist: &mut [f64], limit: f64) {
    let mut excess = 0.0;
    for h in hist.iter_mut() {
        if *h > limit {
            excess += *h - limit;
            *h = limit;
        }
    }
    let share = excess / hist.len() as f64;
    for h in hist.iter_mut() {
        *h += share;
    }
}

/// Normalized inclusive CDF of a histogram.
pub fn cdf_mapping(hist: &[f64]) -> Vec<f64> {
    let total: f64 = hist.iter().sum();
    let mut acc = 0.0;
    hist.iter()
        .map(|h| {
            acc += h;
            if total > 0.0 {
                (acc / total).min(1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Start offsets of `count` near-equal segments of `len`, plus `len`.
fn splits(len: usize, count: usize) -> Vec<usize> {
    (0..=count).map(|i| i * len / count).collect()
}

/// Tile index pair and blend weight of the higher tile for coordinate `p`.
fn interp(p: usize, centres: &[f64]) -> (usize, usize, f64) {
    let p = p as f64;
    let last = centres.len() - 1;
    if p <= centres[0] {
        return (0, 0, 0.0);
    }
    if p >= centres[last] {
        return (last, last, 0.0);
    }
    let hi = centres.partition_point(|&c| c <= p);
    let lo = hi - 1;
    let w = (p - centres[lo]) / (centres[hi] - centres[lo]);
    (lo, hi, w)
}

/// Equalizes a single-channel map with values in [0, 1].
pub fn clahe_plane(plane: &Plane, cfg: &ClaheConfig) -> Result<Plane> {
    cfg.validate()?;
    let (w, h) = plane.dims();
    if w < 2 * cfg.tiles_x || h < 2 * cfg.tiles_y {
        return Err(Error::Param(format!(
            "image {w}x{h} too small for {}x{} tiles of at least 2x2 pixels",
            cfg.tiles_x, cfg.tiles_y
        )));
    }
    let xs = splits(w, cfg.tiles_x);
    let ys = splits(h, cfg.tiles_y);
    let bins = cfg.bins;

    // tile mappings in row-major tile order; each tile is independent
    let maps: Vec<Vec<f64>> = (0..cfg.tiles_x * cfg.tiles_y)
        .into_par_iter()
        .map(|ti| {
            let (tx, ty) = (ti % cfg.tiles_x, ti / cfg.tiles_x);
            let mut hist = vec![0.0; bins];
            for y in ys[ty]..ys[ty + 1] {
                for x in xs[tx]..xs[tx + 1] {
                    hist[bin_of(plane.get(x, y), bins)] += 1.0;
                }
            }
            let pixels = ((xs[tx + 1] - xs[tx]) * (ys[ty + 1] - ys[ty])) as f64;
            clip_histogram(&mut hist, cfg.clip_limit * pixels / bins as f64);
            cdf_mapping(&hist)
        })
        .collect();

    let centre = |s: &[usize], i: usize| (s[i] + s[i + 1] - 1) as f64 / 2.0;
    let cx: Vec<f64> = (0..cfg.tiles_x).map(|i| centre(&xs, i)).collect();
    let cy: Vec<f64> = (0..cfg.tiles_y).map(|i| centre(&ys, i)).collect();

    Ok(Plane::from_fn(w, h, |x, y| {
        let b = bin_of(plane.get(x, y), bins);
        let (x0, x1, wx) = interp(x, &cx);
        let (y0, y1, wy) = interp(y, &cy);
        let m = |tx: usize, ty: usize| maps[ty * cfg.tiles_x + tx][b];
        let top = m(x0, y0) * (1.0 - wx) + m(x1, y0) * wx;
        let bottom = m(x0, y1) * (1.0 - wx) + m(x1, y1) * wx;
        top * (1.0 - wy) + bottom * wy
    }))
}

/// Equalizes luminance and keeps the colour-difference channels.
pub fn clahe_dehaze(hazy: &Image, cfg: &ClaheConfig) -> Result<Image> {
    let y = hazy.luminance();
    let eq = clahe_plane(&y, cfg)?;
    let [kr, kg, kb] = LUMA_WEIGHTS;
    Ok(Image::from_fn(hazy.width(), hazy.height(), |x, yy| {
        let p = hazy.pixel(x, yy);
        let lum = luma(p);
        let (cb, cr) = (p[2] - lum, p[0] - lum);
        let new = eq.get(x, yy);
        let r = new + cr;
        let b = new + cb;
        let g = (new - kr * r - kb * b) / kg;
        [r, g, b]
    }))
}
