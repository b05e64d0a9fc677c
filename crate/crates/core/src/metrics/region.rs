use crate::error::{Error, Result};
use crate::raster::{Plane, Rect};

/// Pixel selection for region statistics.
#[derive(Debug, Clone, PartialEq)]
pub enum RegionMask {
    Rect(Rect),
    /// Row-major boolean mask with the dimensions of the image it selects from.
    Mask {
        width: usize,
        height: usize,
        bits: Vec<bool>,
    },
}

impl From<Rect> for RegionMask {
    fn from(r: Rect) -> Self {
        RegionMask::Rect(r)
    }
}

impl RegionMask {
    /// Row-major pixel indices selected within a `width`×`height` raster.
    pub fn indices(&self, width: usize, height: usize) -> Result<Vec<usize>> {
        let idx: Vec<usize> = match self {
            RegionMask::Rect(r) => {
                if !r.fits_within(width, height) {
                    return Err(Error::Shape(format!("region {r:?} outside {width}x{height}")));
                }
                (r.y..r.y + r.height)
                    .flat_map(|y| (r.x..r.x + r.width).map(move |x| y * width + x))
                    .collect()
            }
            RegionMask::Mask {
                width: mw,
                height: mh,
                bits,
            } => {
                if (*mw, *mh) != (width, height) || bits.len() != width * height {
                    return Err(Error::Shape(format!("mask {mw}x{mh} vs raster {width}x{height}")));
                }
                bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect()
            }
        };
        if idx.is_empty() {
            return Err(Error::Param("region selects no pixels".into()));
        }
        Ok(idx)
    }
}

/// Mean after dropping `floor(trim·n)` values from each end of the sorted sample.
pub fn trimmed_mean(values: &[f64], trim_fraction: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::Param(format!("trim fraction {trim_fraction} not in [0,0.5)")));
    }
    if values.is_empty() {
        return Err(Error::Param("trimmed mean of an empty region".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let drop = (trim_fraction * n as f64).floor() as usize;
    let kept = &sorted[drop..n - drop];
    Ok(kept.iter().sum::<f64>() / kept.len() as f64)
}

pub fn trimmed_mean_region(map: &Plane, mask: &RegionMask, trim_fraction: f64) -> Result<f64> {
    let idx = mask.indices(map.width(), map.height())?;
    let values: Vec<f64> = idx.iter().map(|&i| map.data()[i]).collect();
    trimmed_mean(&values, trim_fraction)
}
