//! Dark channel prior.

use serde::{Deserialize, Serialize};

use crate::dehaze::filters::min_filter;
use crate::dehaze::guided::{guided_filter, GuidedConfig};
use crate::error::{Error, Result};
use crate::koschmieder::invert_haze;
use crate::raster::{Airlight, Image, Plane, TransmissionMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DcpConfig {
    pub patch_radius: usize,
    /// Fraction of haze removed; values below 1 keep some aerial perspective.
    pub omega: f64,
    pub t_floor: f64,
    /// `None` disables guided-filter refinement (`refine = false` in TOML).
    #[serde(with = "crate::dehaze::guided::optional")]
    pub refine: Option<GuidedConfig>,
}

impl Default for DcpConfig {
    fn default() -> Self {
        Self {
            patch_radius: 7,
            omega: 0.95,
            t_floor: 0.1,
            refine: Some(GuidedConfig::default()),
        }
    }
}

impl DcpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::validation("dcp.omega", format!("{} not in (0,1]", self.omega)));
        }
        if !(self.t_floor > 0.0 && self.t_floor <= 1.0) {
            return Err(Error::validation("dcp.t_floor", format!("{} not in (0,1]", self.t_floor)));
        }
        if let Some(g) = self.refine {
            if !(g.epsilon > 0.0) {
                return Err(Error::validation("dcp.refine.epsilon", "must be > 0"));
            }
        }
        Ok(())
    }
}

/// Window min over the (2r+1)² neighbourhood of the per-pixel channel min.
pub fn dark_channel(image: &Image, patch_radius: usize) -> Plane {
    min_filter(&image.min_channel(), patch_radius)
}

pub fn dcp_transmission(hazy: &Image, a: Airlight, cfg: &DcpConfig) -> Result<TransmissionMap> {
    cfg.validate()?;
    let a = a.rgb();
    let (w, h) = hazy.dims();
    let normalized = Plane::new(
        w,
        h,
        hazy.pixels()
            .map(|p| (p[0] / a[0]).min(p[1] / a[1]).min(p[2] / a[2]))
            .collect(),
    )?;
    let dark = min_filter(&normalized, cfg.patch_radius);
    let raw = dark.map(|d| 1.0 - cfg.omega * d);
    let t = match cfg.refine {
        Some(g) => guided_filter(&hazy.luminance(), &raw, g.radius, g.epsilon)?,
        None => raw,
    };
    TransmissionMap::new(t.clamp(cfg.t_floor, 1.0))
}

pub fn dcp_dehaze(hazy: &Image, a: Airlight, cfg: &DcpConfig) -> Result<(Image, TransmissionMap)> {
    let t = dcp_transmission(hazy, a, cfg)?;
    let restored = invert_haze(hazy, &t, a, cfg.t_floor)?;
    Ok((restored, t))
}

/// Mean colour of the brightest 0.1% dark-channel pixels (at least one).
/// Convenience for ad-hoc use; benchmark runs always take A∞ from the manifest.
pub fn estimate_airlight(image: &Image, patch_radius: usize) -> Result<Airlight> {
    if image.pixel_count() == 0 {
        return Err(Error::Param("cannot estimate airlight of an empty image".into()));
    }
    let dark = dark_channel(image, patch_radius);
    let mut order: Vec<usize> = (0..dark.data().len()).collect();
    // stable sort keeps ties in raster order
    order.sort_by(|&i, &j| dark.data()[j].total_cmp(&dark.data()[i]));
    let count = ((order.len() as f64) * 0.001).ceil().max(1.0) as usize;
    let mut sum = [0.0; 3];
    for &i in &order[..count] {
        let p = image.pixel(i % image.width(), i / image.width());
        for c in 0..3 {
            sum[c] += p[c];
        }
    }
    Airlight::new(sum.map(|s| (s / count as f64).clamp(1.0 / 255.0, 1.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koschmieder::apply_haze;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rng: &mut ChaCha8Rng, w: usize, h: usize) -> Image {
        Image::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
    }

    #[test]
    fn dark_channel_trivial_cases() {
        let white = Image::filled(6, 4, [1.0; 3]);
        assert!(dark_channel(&white, 3).data().iter().all(|&v| v == 1.0));
        let no_blue = Image::from_fn(6, 4, |x, y| [x as f64 / 6.0, y as f64 / 4.0, 0.0]);
        assert!(dark_channel(&no_blue, 1).data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dark_channel_center_of_5x5_is_min_of_27() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let img = random_image(&mut rng, 5, 5);
        let mut expected = f64::INFINITY;
        for y in 1..=3 {
            for x in 1..=3 {
                for v in img.pixel(x, y) {
                    expected = expected.min(v);
                }
            }
        }
        assert_eq!(dark_channel(&img, 1).get(2, 2), expected);
    }

    #[test]
    fn radius_zero_is_channel_min_and_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let img = random_image(&mut rng, 8, 8);
        assert_eq!(dark_channel(&img, 0), img.min_channel());
        let base = dark_channel(&img, 2);
        for _ in 0..20 {
            let (x, y) = (rng.random_range(0..8), rng.random_range(0..8));
            let mut brighter = img.clone();
            let p = brighter.pixel(x, y).map(|v| (v + 0.3).min(1.0));
            brighter.set_pixel(x, y, p);
            let after = dark_channel(&brighter, 2);
            assert!(after.data().iter().zip(base.data()).all(|(a, b)| a >= b));
        }
    }

    #[test]
    fn pure_airlight_and_black_inputs() {
        let a = Airlight::new([0.8, 0.85, 0.9]).unwrap();
        let hazy = Image::filled(20, 20, a.rgb());
        let t = dcp_transmission(&hazy, a, &DcpConfig::default()).unwrap();
        assert!(t.as_plane().data().iter().all(|&v| (v - 0.1).abs() < 1e-12));
        let mild = DcpConfig {
            omega: 0.5,
            ..DcpConfig::default()
        };
        let t = dcp_transmission(&hazy, a, &mild).unwrap();
        assert!(t.as_plane().data().iter().all(|&v| (v - 0.5).abs() < 1e-12));

        let black = Image::filled(20, 20, [0.0; 3]);
        let t = dcp_transmission(&black, a, &DcpConfig::default()).unwrap();
        assert!(t.as_plane().data().iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn shadowed_input_is_left_alone() {
        let img = Image::from_fn(16, 16, |x, y| if (x + y) % 2 == 0 { [0.0, 0.4, 0.6] } else { [0.5, 0.0, 0.3] });
        let (out, t) = dcp_dehaze(&img, Airlight::white(), &DcpConfig::default()).unwrap();
        assert!(t.as_plane().data().iter().all(|&v| v > 0.999));
        assert!(out.mean_abs_diff(&img).unwrap() < 1e-3);
    }

    #[test]
    fn synthetic_round_trip_recovers_image() {
        // every 3x3 window contains a pixel with a zero channel
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let clear = Image::from_fn(32, 32, |x, y| {
            let mut p: [f64; 3] = [rng.random(), rng.random(), rng.random()];
            if x % 2 == 0 && y % 2 == 0 {
                p[(x + y) % 3] = 0.0;
            }
            p.map(|v| v * 0.8)
        });
        let hazy = apply_haze(&clear, 0.5, Airlight::white()).unwrap();
        let cfg = DcpConfig {
            patch_radius: 1,
            omega: 1.0,
            refine: None,
            ..DcpConfig::default()
        };
        let (restored, t) = dcp_dehaze(&hazy, Airlight::white(), &cfg).unwrap();
        assert!(t.as_plane().data().iter().all(|&v| (v - 0.5).abs() < 1e-12));
        assert!(restored.mean_abs_diff(&clear).unwrap() < 1e-9);

        let refined = DcpConfig {
            refine: Some(GuidedConfig { radius: 4, epsilon: 1e-3 }),
            ..cfg
        };
        let (restored, _) = dcp_dehaze(&hazy, Airlight::white(), &refined).unwrap();
        assert!(restored.mean_abs_diff(&clear).unwrap() < 0.02);
    }

    #[test]
    fn transmission_within_bounds_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let img = random_image(&mut rng, 24, 18);
        let a = Airlight::new([0.9, 0.8, 0.95]).unwrap();
        let cfg = DcpConfig {
            refine: Some(GuidedConfig { radius: 3, epsilon: 1e-4 }),
            ..DcpConfig::default()
        };
        let t1 = dcp_transmission(&img, a, &cfg).unwrap();
        let t2 = dcp_transmission(&img, a, &cfg).unwrap();
        assert_eq!(t1, t2);
        assert!(t1.as_plane().data().iter().all(|&v| (0.1..=1.0).contains(&v)));
    }

    #[test]
    fn airlight_estimate_picks_haziest_region() {
        let img = Image::from_fn(40, 40, |x, _| if x > 30 { [0.9, 0.92, 0.95] } else { [0.2, 0.1, 0.05] });
        let a = estimate_airlight(&img, 2).unwrap();
        assert_eq!(a.rgb(), [0.9, 0.92, 0.95]);
    }

    #[test]
    fn config_validation() {
        let bad = DcpConfig {
            omega: 0.0,
            ..DcpConfig::default()
        };
        assert!(dcp_transmission(&Image::filled(4, 4, [0.5; 3]), Airlight::white(), &bad).is_err());
    }
}
