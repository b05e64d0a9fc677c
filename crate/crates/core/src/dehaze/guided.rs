//! Gray-guide guided filter (local linear model smoothing).

use serde::{Deserialize, Serialize};

use crate::dehaze::filters::box_mean;
use crate::error::{Error, Result};
use crate::raster::{ensure_same_dims, Plane};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GuidedConfig {
    pub radius: usize,
    pub epsilon: f64,
}

impl Default for GuidedConfig {
    fn default() -> Self {
        Self {
            radius: 30,
            epsilon: 1e-3,
        }
    }
}

/// Serde adapter for `Option<GuidedConfig>` that accepts either a table or
/// `false` (refinement off). `None` serializes as `false`.
pub mod optional {
    use super::GuidedConfig;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Flag(bool),
        On(GuidedConfig),
    }

    pub fn serialize<S: Serializer>(v: &Option<GuidedConfig>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(g) => Repr::On(*g).serialize(s),
            None => Repr::Flag(false).serialize(s),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<GuidedConfig>, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Flag(false) => Ok(None),
            Repr::Flag(true) => Ok(Some(GuidedConfig::default())),
            Repr::On(g) => Ok(Some(g)),
        }
    }
}

/// Per window fits `input ≈ a·guide + b`, then averages the coefficients of
/// every window covering a pixel.
pub fn guided_filter(guide: &Plane, input: &Plane, radius: usize, epsilon: f64) -> Result<Plane> {
    ensure_same_dims(guide.dims(), input.dims())?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::Param(format!("guided filter epsilon {epsilon} must be > 0")));
    }
    let mean_g = box_mean(guide, radius);
    let mean_p = box_mean(input, radius);
    let corr_gg = box_mean(&guide.zip_map(guide, |a, b| a * b)?, radius);
    let corr_gp = box_mean(&guide.zip_map(input, |a, b| a * b)?, radius);

    let (w, h) = guide.dims();
    let mut a = Plane::filled(w, h, 0.0);
    let mut b = Plane::filled(w, h, 0.0);
    for i in 0..w * h {
        let mg = mean_g.data()[i];
        let mp = mean_p.data()[i];
        let var = (corr_gg.data()[i] - mg * mg).max(0.0);
        let cov = corr_gp.data()[i] - mg * mp;
        let ai = cov / (var + epsilon);
        a.data_mut()[i] = ai;
        b.data_mut()[i] = mp - ai * mg;
    }
    let mean_a = box_mean(&a, radius);
    let mean_b = box_mean(&b, radius);
    let data = (0..w * h)
        .map(|i| mean_a.data()[i] * guide.data()[i] + mean_b.data()[i])
        .collect();
    Plane::new(w, h, data)
}
