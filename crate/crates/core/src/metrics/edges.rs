//! Visible-edge indices `e` (new visible edges) and `r` (mean gradient gain).
//!
//! Gradients are 3×3 Sobel responses on BT.601 luminance, scaled by 1/8 so a
//! ramp of slope `s` per pixel yields magnitude `s`. Borders are clamped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, Image, Plane};

/// Reference magnitudes are floored at this value before forming ratios.
pub const GRADIENT_FLOOR: f64 = 1.0 / 255.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EdgeMetricConfig {
    /// Minimum gradient magnitude of a visible edge, on [0, 1] luminance.
    pub threshold: f64,
    /// Upper clamp on per-pixel gradient ratios.
    pub ratio_clamp: f64,
}

impl Default for EdgeMetricConfig {
    fn default() -> Self {
        Self {
            threshold: 0.05,
            ratio_clamp: 10.0,
        }
    }
}

impl EdgeMetricConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(Error::validation("edges.threshold", "must be > 0"));
        }
        if !(self.ratio_clamp > 1.0) {
            return Err(Error::validation("edges.ratio_clamp", "must be > 1"));
        }
        Ok(())
    }
}

pub fn sobel_magnitude(lum: &Plane) -> Plane {
    let (w, h) = lum.dims();
    let at = |x: isize, y: isize| {
        lum.get(
            x.clamp(0, w as isize - 1) as usize,
            y.clamp(0, h as isize - 1) as usize,
        )
    };
    Plane::from_fn(w, h, |x, y| {
        let (x, y) = (x as isize, y as isize);
        let gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
        let gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1))
            - (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
        (gx / 8.0).hypot(gy / 8.0)
    })
}

/// Row-major visible-edge flags.
pub fn visible_edges(image: &Image, cfg: &EdgeMetricConfig) -> Vec<bool> {
    sobel_magnitude(&image.luminance())
        .data()
        .iter()
        .map(|&m| m >= cfg.threshold)
        .collect()
}

/// `(n_restored − n_reference) / n_reference`; `None` when the reference has
/// no visible edges.
pub fn e_index(reference_hazy: &Image, restored: &Image, cfg: &EdgeMetricConfig) -> Result<Option<f64>> {
    cfg.validate()?;
    ensure_same_dims(reference_hazy.dims(), restored.dims())?;
    let n_ref = visible_edges(reference_hazy, cfg).iter().filter(|b| **b).count();
    let n_res = visible_edges(restored, cfg).iter().filter(|b| **b).count();
    if n_ref == 0 {
        return Ok(None);
    }
    Ok(Some((n_res as f64 - n_ref as f64) / n_ref as f64))
}

/// Geometric mean of the gradient ratio over the restored image's visible
/// edges; `None` when the restored image has none.
pub fn r_index(reference_hazy: &Image, restored: &Image, cfg: &EdgeMetricConfig) -> Result<Option<f64>> {
    cfg.validate()?;
    ensure_same_dims(reference_hazy.dims(), restored.dims())?;
    let g_ref = sobel_magnitude(&reference_hazy.luminance());
    let g_res = sobel_magnitude(&restored.luminance());
    let mut log_sum = 0.0;
    let mut n = 0usize;
    for (&a, &b) in g_res.data().iter().zip(g_ref.data()) {
        if a >= cfg.threshold {
            let ratio = (a / b.max(GRADIENT_FLOOR)).min(cfg.ratio_clamp);
            log_sum += ratio.ln();
            n += 1;
        }
    }
    if n == 0 {
        return Ok(None);
    }
    Ok(Some((log_sum / n as f64).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> Image {
        Image::from_fn(w, h, |x, y| [f(x, y); 3])
    }

    #[test]
    fn constant_has_no_edges() {
        let img = gray(8, 8, |_, _| 0.4);
        assert!(visible_edges(&img, &EdgeMetricConfig::default()).iter().all(|b| !b));
    }

    #[test]
    fn vertical_step_detected() {
        let img = gray(10, 6, |x, _| if x < 5 { 0.0 } else { 1.0 });
        let edges = visible_edges(&img, &EdgeMetricConfig::default());
        for y in 0..6 {
            for x in 0..10 {
                assert_eq!(edges[y * 10 + x], x == 4 || x == 5, "({x},{y})");
            }
        }
        assert!((sobel_magnitude(&img.luminance()).get(4, 3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn shallow_ramp_invisible() {
        // slope 0.04/px: interior Sobel response is exactly the slope
        let img = gray(20, 5, |x, _| 0.1 + 0.04 * x as f64);
        let mag = sobel_magnitude(&img.luminance());
        assert!((mag.get(10, 2) - 0.04).abs() < 1e-12);
        assert!(visible_edges(&img, &EdgeMetricConfig::default()).iter().all(|b| !b));
    }

    #[test]
    fn identical_images() {
        let img = gray(12, 12, |x, y| if (x / 3 + y / 4) % 2 == 0 { 0.2 } else { 0.7 });
        let cfg = EdgeMetricConfig::default();
        assert_eq!(e_index(&img, &img, &cfg).unwrap(), Some(0.0));
        assert_eq!(r_index(&img, &img, &cfg).unwrap(), Some(1.0));
    }

    #[test]
    fn doubling_edge_count_gives_e_of_one() {
        let cfg = EdgeMetricConfig::default();
        let one = gray(16, 8, |x, _| if x < 8 { 0.2 } else { 0.8 });
        let two = gray(16, 8, |x, _| if (4..12).contains(&x) { 0.8 } else { 0.2 });
        assert_eq!(e_index(&one, &two, &cfg).unwrap(), Some(1.0));
        assert!(e_index(&two, &one, &cfg).unwrap().unwrap() < 0.0);
    }

    #[test]
    fn contrast_doubling_gives_r_of_two() {
        let cfg = EdgeMetricConfig::default();
        let base = gray(16, 16, |x, y| 0.5 + 0.2 * (((x * 3 + y * 5) % 7) as f64 / 6.0 - 0.5));
        let mean = 0.5;
        let doubled = Image::from_fn(16, 16, |x, y| {
            let v = base.pixel(x, y)[0];
            [mean + 2.0 * (v - mean); 3]
        });
        let r = r_index(&base, &doubled, &cfg).unwrap().unwrap();
        assert!((r - 2.0).abs() < 1e-6, "{r}");
    }

    #[test]
    fn ratios_are_clamped_and_undefined_cases() {
        let cfg = EdgeMetricConfig::default();
        let flat = gray(10, 10, |_, _| 0.5);
        let step = gray(10, 10, |x, _| if x < 5 { 0.0 } else { 1.0 });
        let r = r_index(&flat, &step, &cfg).unwrap().unwrap();
        assert!((r - 10.0).abs() < 1e-12, "{r}");
        assert_eq!(e_index(&flat, &step, &cfg).unwrap(), None);
        assert_eq!(r_index(&step, &flat, &cfg).unwrap(), None);
    }
}
