//! Atmospheric-veil restoration (median-based veil inference).
//!
//! The veil `V` is an achromatic additive layer bounded by the whiteness
//! `W = min_c I_c`. It is inferred with a median filter and its local
//! deviation, then removed as `(I − V) / (1 − V / A)`.

use serde::{Deserialize, Serialize};

use crate::dehaze::filters::median_filter;
use crate::error::{Error, Result};
use crate::raster::{Airlight, Image, Plane, TransmissionMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VeilConfig {
    /// Median window half-size.
    pub window: usize,
    /// Fraction of the inferred veil that is removed.
    pub p: f64,
    pub t_floor: f64,
}

impl Default for VeilConfig {
    fn default() -> Self {
        Self {
            window: 20,
            p: 0.95,
            t_floor: 0.1,
        }
    }
}

impl VeilConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window < 1 {
            return Err(Error::validation("fast.window", "must be >= 1"));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::validation("fast.p", format!("{} not in (0,1]", self.p)));
        }
        if !(self.t_floor > 0.0 && self.t_floor <= 1.0) {
            return Err(Error::validation("fast.t_floor", format!("{} not in (0,1]", self.t_floor)));
        }
        Ok(())
    }
}

pub fn atmospheric_veil(hazy: &Image, cfg: &VeilConfig) -> Result<Plane> {
    cfg.validate()?;
    let (w, h) = hazy.dims();
    let side = 2 * cfg.window + 1;
    if side > w || side > h {
        return Err(Error::Param(format!(
            "veil window {side}x{side} larger than image {w}x{h}"
        )));
    }
    let whiteness = hazy.min_channel();
    let local = median_filter(&whiteness, cfg.window);
    let deviation = whiteness.zip_map(&local, |a, b| (a - b).abs())?;
    let spread = median_filter(&deviation, cfg.window);
    let data = (0..w * h)
        .map(|i| {
            let c = local.data()[i] - spread.data()[i];
            (cfg.p * c).clamp(0.0, whiteness.data()[i])
        })
        .collect();
    Plane::new(w, h, data)
}

/// Returns the restored image and the veil.
pub fn veil_dehaze(hazy: &Image, a: Airlight, cfg: &VeilConfig) -> Result<(Image, Plane)> {
    let veil = atmospheric_veil(hazy, cfg)?;
    let a_gray = a.mean();
    let data = hazy
        .data()
        .chunks_exact(3)
        .zip(veil.data())
        .flat_map(|(px, &v)| {
            let denom = (1.0 - v / a_gray).max(cfg.t_floor);
            [0, 1, 2].map(|c| ((px[c] - v) / denom).clamp(0.0, 1.0))
        })
        .collect();
    Ok((Image::new(hazy.width(), hazy.height(), data)?, veil))
}

/// Transmission implied by a veil: `t = 1 − V / mean(A)`, clamped to [0, 1].
pub fn veil_transmission(veil: &Plane, a: Airlight) -> TransmissionMap {
    let a_gray = a.mean();
    TransmissionMap::clamped(&veil.map(|v| 1.0 - v / a_gray))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> VeilConfig {
        VeilConfig {
            window: 2,
            ..VeilConfig::default()
        }
    }

    #[test]
    fn zero_whiteness_means_no_veil() {
        let img = Image::from_fn(10, 10, |x, y| [x as f64 / 10.0, 0.0, y as f64 / 10.0]);
        let (out, veil) = veil_dehaze(&img, Airlight::white(), &small()).unwrap();
        assert!(veil.data().iter().all(|&v| v == 0.0));
        assert_eq!(out, img);
    }

    #[test]
    fn constant_gray_closed_form() {
        let c = 0.6;
        let a = Airlight::gray(0.9).unwrap();
        let img = Image::filled(9, 9, [c; 3]);
        let cfg = small();
        let (out, veil) = veil_dehaze(&img, a, &cfg).unwrap();
        let v = cfg.p * c;
        assert!(veil.data().iter().all(|&x| (x - v).abs() < 1e-15));
        let expected = ((c - v) / (1.0 - v / 0.9)).clamp(0.0, 1.0);
        assert!(out.data().iter().all(|&x| (x - expected).abs() < 1e-12));
    }

    #[test]
    fn veil_bounded_by_whiteness() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let img = Image::from_fn(20, 15, |_, _| [rng.random(), rng.random(), rng.random()]);
        let veil = atmospheric_veil(&img, &small()).unwrap();
        let white = img.min_channel();
        for (v, w) in veil.data().iter().zip(white.data()) {
            assert!(*v >= 0.0 && v <= w);
        }
        let again = atmospheric_veil(&img, &small()).unwrap();
        assert_eq!(veil, again);
    }

    #[test]
    fn oversized_window_rejected() {
        let img = Image::filled(10, 10, [0.5; 3]);
        let cfg = VeilConfig {
            window: 5,
            ..VeilConfig::default()
        };
        assert!(matches!(veil_dehaze(&img, Airlight::white(), &cfg), Err(Error::Param(_))));
    }

    #[test]
    fn veil_to_transmission() {
        let veil = Plane::new(3, 1, vec![0.0, 0.45, 0.9]).unwrap();
        let t = veil_transmission(&veil, Airlight::gray(0.9).unwrap());
        assert_eq!(t.as_plane().data(), &[1.0, 0.5, 0.0]);
    }
}
