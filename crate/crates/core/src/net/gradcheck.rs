//! Central finite-difference check of [`loss_and_gradients`].
//!
//! The network is piecewise smooth (maxout, max pooling, BReLU). A component
//! is skipped when perturbing it by ±h changes any branch decision, since the
//! difference quotient then straddles a kink.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::model::{loss_and_gradients, mse, trace, NetParams};
use crate::synth::PatchSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheck {
    pub max_relative_error: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// Relative error `|a − n| / max(|a|, |n|, floor)`; the floor keeps
/// vanishing gradients from turning round-off into large ratios.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

fn patterns(params: &NetParams, batch: &[PatchSample]) -> Result<Vec<Vec<usize>>> {
    batch
        .iter()
        .map(|s| Ok(trace(params, &s.patch)?.switch_pattern(params.brelu_lo, params.brelu_hi)))
        .collect()
}

/// Compares analytic and numeric derivatives of the batch MSE for
/// `components` randomly chosen parameters.
pub fn gradient_check(
    params: &NetParams,
    batch: &[PatchSample],
    components: usize,
    h: f64,
    floor: f64,
    seed: u64,
) -> Result<GradCheck> {
    if !(h > 0.0) {
        return Err(Error::Param("finite-difference step must be > 0".into()));
    }
    let (_, grads) = loss_and_gradients(params, batch)?;
    let analytic = grads.to_flat();
    let base = params.to_flat();
    let base_pattern = patterns(params, batch)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks = sample(&mut rng, base.len(), components.min(base.len()));

    let mut probe = params.clone();
    let mut out = GradCheck {
        max_relative_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for k in picks {
        let mut eval = |delta: f64| -> Result<(f64, bool)> {
            let mut flat = base.clone();
            flat[k] += delta;
            probe.set_flat(&flat)?;
            Ok((mse(&probe, batch)?, patterns(&probe, batch)? == base_pattern))
        };
        let (plus, same_plus) = eval(h)?;
        let (minus, same_minus) = eval(-h)?;
        if !(same_plus && same_minus) {
            out.skipped += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * h);
        out.max_relative_error = out.max_relative_error.max(relative_error(analytic[k], numeric, floor));
        out.checked += 1;
    }
    Ok(out)
}

/// Shifts the output bias so the first sample's pre-activation sits at the
/// middle of the BReLU range, where the gradient is non-zero.
pub fn center_output(params: &mut NetParams, patch: &crate::raster::Image) -> Result<()> {
    let z = trace(params, patch)?.z;
    let mid = 0.5 * (params.brelu_lo + params.brelu_hi);
    params.conv3.bias[0] += mid - z;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::model::Architecture;
    use crate::synth::{procedural_sources, synthesize_patch_dataset, SynthConfig};

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let sources = procedural_sources(2, 32, 3);
        let batch = synthesize_patch_dataset(&sources, &SynthConfig { count: 2, seed: 4, ..Default::default() }).unwrap();
        for draw in 0..5 {
            let mut params = NetParams::init(Architecture::default(), 1.0, draw).unwrap();
            center_output(&mut params, &batch[0].patch).unwrap();
            let check = gradient_check(&params, &batch, 40, 1e-5, 1e-6, draw).unwrap();
            assert!(check.checked > 20, "{check:?}");
            assert!(check.max_relative_error < 1e-4, "{check:?}");
        }
    }

    #[test]
    fn relative_error_floor() {
        assert_eq!(relative_error(1.0, 1.0, 1e-6), 0.0);
        assert!((relative_error(1e-12, 0.0, 1e-6) - 1e-6).abs() < 1e-18);
    }
}
