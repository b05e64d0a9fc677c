//! The Koschmieder imaging model `J = I·t + A(1 − t)` with `t = exp(−β·d)`.

use crate::error::{Error, Result};
use crate::raster::{
    Airlight, Beta, DepthMap, Image, PartialTransmission, Transmission,
};

/// Lower bound applied to `t` during inversion unless overridden.
pub const DEFAULT_T_FLOOR: f64 = 0.1;

/// Renders haze over a clear image.
pub fn apply_haze<'a>(image: &Image, t: impl Into<Transmission<'a>>, a: Airlight) -> Result<Image> {
    let t = t.into();
    t.check(image.dims())?;
    let a = a.rgb();
    let data = image
        .data()
        .chunks_exact(3)
        .enumerate()
        .flat_map(|(i, px)| {
            let ti = t.at(i);
            [0, 1, 2].map(|c| (px[c] * ti + a[c] * (1.0 - ti)).clamp(0.0, 1.0))
        })
        .collect();
    Image::new(image.width(), image.height(), data)
}

/// Solves the model for the clear image. `t` is floored at `t_floor` and the
/// result is clamped to [0, 1].
pub fn invert_haze<'a>(
    hazy: &Image,
    t: impl Into<Transmission<'a>>,
    a: Airlight,
    t_floor: f64,
) -> Result<Image> {
    if !(t_floor > 0.0 && t_floor <= 1.0) {
        return Err(Error::Param(format!("t_floor {t_floor} must lie in (0,1]")));
    }
    let t = t.into();
    t.check(hazy.dims())?;
    let a = a.rgb();
    let data = hazy
        .data()
        .chunks_exact(3)
        .enumerate()
        .flat_map(|(i, px)| {
            let ti = t.at(i).max(t_floor);
            [0, 1, 2].map(|c| ((px[c] - a[c]) / ti + a[c]).clamp(0.0, 1.0))
        })
        .collect();
    Image::new(hazy.width(), hazy.height(), data)
}

pub fn transmission_from_depth(depth_m: f64, beta: Beta) -> Result<f64> {
    if !depth_m.is_finite() || depth_m < 0.0 {
        return Err(Error::Domain(format!("depth {depth_m} must be finite and >= 0")));
    }
    Ok((-beta.per_meter() * depth_m).exp())
}

/// Per-sample `exp(−β·d)`; unknown depths stay unknown.
pub fn transmission_from_depth_map(depth: &DepthMap, beta: Beta) -> PartialTransmission {
    let (width, height) = depth.dims();
    PartialTransmission {
        width,
        height,
        // DepthMap guarantees known samples are finite and non-negative
        data: depth
            .data()
            .iter()
            .map(|d| d.map(|d| (-beta.per_meter() * d).exp()))
            .collect(),
    }
}

pub fn depth_from_transmission(t: f64, beta: Beta) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("transmission {t} must lie in (0,1]")));
    }
    Ok(-t.ln() / beta.per_meter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{Plane, TransmissionMap};
    use proptest::prelude::*;

    fn px(rgb: [f64; 3]) -> Image {
        Image::new(1, 1, rgb.to_vec()).unwrap()
    }

    #[test]
    fn identity_and_pure_airlight() {
        let img = Image::from_fn(3, 2, |x, y| [x as f64 / 3.0, y as f64 / 2.0, 0.7]);
        let a = Airlight::new([0.3, 0.6, 0.9]).unwrap();
        assert_eq!(apply_haze(&img, 1.0, a).unwrap(), img);
        let fog = apply_haze(&img, 0.0, Airlight::gray(0.9).unwrap()).unwrap();
        assert!(fog.data().iter().all(|&v| (v - 0.9).abs() < 1e-15));
    }

    #[test]
    fn hand_evaluated_pixel() {
        let out = apply_haze(&px([0.2, 0.4, 0.6]), 0.5, Airlight::white()).unwrap();
        for (v, e) in out.data().iter().zip([0.6, 0.7, 0.8]) {
            assert!((v - e).abs() < 1e-12);
        }
        let inv = invert_haze(&px([0.9; 3]), 0.5, Airlight::white(), 0.1).unwrap();
        assert!((inv.data()[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn invert_with_unit_t_is_identity() {
        let img = Image::from_fn(4, 4, |x, y| [x as f64 / 4.0, 0.5, y as f64 / 4.0]);
        let out = invert_haze(&img, 1.0, Airlight::gray(0.8).unwrap(), 0.1).unwrap();
        for (a, b) in out.data().iter().zip(img.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn invert_rejects_bad_floor_and_shape() {
        let img = Image::filled(2, 2, [0.5; 3]);
        assert!(matches!(
            invert_haze(&img, 0.5, Airlight::white(), 0.0),
            Err(Error::Param(_))
        ));
        let t = TransmissionMap::uniform(3, 2, 0.5);
        assert!(matches!(apply_haze(&img, &t, Airlight::white()), Err(Error::Shape(_))));
        assert!(matches!(
            invert_haze(&img, &t, Airlight::white(), 0.1),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn table_ground_truth_rows() {
        let back = transmission_from_depth(7.0, Beta::from_e3(103.69).unwrap()).unwrap();
        assert!((back - 0.484).abs() <= 0.001);
        let table = transmission_from_depth(4.35, Beta::from_e3(83.57).unwrap()).unwrap();
        assert!((table - 0.695).abs() <= 0.001);
        assert_eq!(transmission_from_depth(0.0, Beta::new(3.0).unwrap()).unwrap(), 1.0);
        assert!(transmission_from_depth(-1.0, Beta::new(1.0).unwrap()).is_err());
    }

    #[test]
    fn depth_inverse() {
        let b = Beta::new(0.10369).unwrap();
        assert_eq!(depth_from_transmission(1.0, b).unwrap(), 0.0);
        assert!((depth_from_transmission(0.484, b).unwrap() - 7.0).abs() < 0.01);
        let unit = Beta::new(1.0).unwrap();
        assert!((depth_from_transmission((-1.0f64).exp(), unit).unwrap() - 1.0).abs() < 1e-12);
        assert!(depth_from_transmission(0.0, b).is_err());
        assert!(depth_from_transmission(1.5, b).is_err());
    }

    #[test]
    fn depth_map_keeps_unknowns() {
        let d = DepthMap::new(2, 1, vec![Some(1.0), None]).unwrap();
        let t = transmission_from_depth_map(&d, Beta::new(1.0).unwrap());
        assert!((t.data[0].unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(t.data[1], None);
        assert!(DepthMap::new(1, 1, vec![Some(-2.0)]).is_err());
    }

    fn arb_case() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, [f64; 3])> {
        (1usize..36).prop_flat_map(|n| {
            (
                prop::collection::vec(0.0f64..=1.0, n * 3),
                prop::collection::vec(0.1f64..=1.0, n),
                [0.05f64..=1.0, 0.05f64..=1.0, 0.05f64..=1.0],
            )
        })
    }

    proptest! {
        #[test]
        fn round_trip_and_convexity((img, t, a) in arb_case()) {
            let n = t.len();
            let image = Image::new(n, 1, img).unwrap();
            let tmap = TransmissionMap::new(Plane::new(n, 1, t).unwrap()).unwrap();
            let a = Airlight::new(a).unwrap();
            let hazy = apply_haze(&image, &tmap, a).unwrap();
            for (i, (h, o)) in hazy.data().iter().zip(image.data()).enumerate() {
                let ac = a.rgb()[i % 3];
                prop_assert!(*h >= o.min(ac) - 1e-12 && *h <= o.max(ac) + 1e-12);
            }
            let back = invert_haze(&hazy, &tmap, a, 0.1).unwrap();
            for (b, o) in back.data().iter().zip(image.data()) {
                prop_assert!((b - o).abs() < 1e-6);
            }
        }

        #[test]
        fn transmission_strictly_decreasing(d1 in 0.0f64..50.0, dd in 0.01f64..10.0, b1 in 0.001f64..0.5, db in 0.001f64..0.5) {
            let beta = Beta::new(b1).unwrap();
            let near = transmission_from_depth(d1, beta).unwrap();
            let far = transmission_from_depth(d1 + dd, beta).unwrap();
            prop_assert!(far < near);
            if d1 > 0.0 {
                let thicker = transmission_from_depth(d1, Beta::new(b1 + db).unwrap()).unwrap();
                prop_assert!(thicker < near);
            }
        }

        #[test]
        fn depth_round_trip(t in 1e-6f64..=1.0, b in 1e-3f64..2.0) {
            let beta = Beta::new(b).unwrap();
            let d = depth_from_transmission(t, beta).unwrap();
            prop_assert!((transmission_from_depth(d, beta).unwrap() - t).abs() < 1e-9);
        }
    }
}
