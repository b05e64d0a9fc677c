//! Architecture, parameters, forward pass and exact reverse-mode gradients.
//!
//! Stages: valid conv → maxout → parallel same-padded convs (concatenated) →
//! stride-1 valid max-pool → valid conv to a single value → BReLU.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::net::layers::{brelu, brelu_grad, max_pool, maxout_tensor, Conv, Tensor};
use crate::raster::Image;
use crate::synth::PatchSample;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub input_size: usize,
    pub in_channels: usize,
    pub conv1_kernel: usize,
    pub conv1_maps: usize,
    pub group_size: usize,
    pub scale_kernels: Vec<usize>,
    pub pool: usize,
    pub conv3_kernel: usize,
}

impl Default for Architecture {
    fn default() -> Self {
        Self {
            input_size: 16,
            in_channels: 3,
            conv1_kernel: 5,
            conv1_maps: 16,
            group_size: 4,
            scale_kernels: vec![3, 5, 7],
            pool: 7,
            conv3_kernel: 6,
        }
    }
}

impl Architecture {
    pub fn maxout_maps(&self) -> usize {
        self.conv1_maps / self.group_size
    }

    pub fn concat_maps(&self) -> usize {
        self.maxout_maps() * self.scale_kernels.len()
    }

    pub fn validate(&self) -> Result<()> {
        let shape = |m: String| Err(Error::Shape(m));
        if self.in_channels != 3 {
            return shape(format!("expected 3 input channels, got {}", self.in_channels));
        }
        if self.group_size == 0 || self.conv1_maps == 0 || !self.conv1_maps.is_multiple_of(self.group_size) {
            return shape(format!(
                "conv1 maps {} not divisible by group size {}",
                self.conv1_maps, self.group_size
            ));
        }
        if self.scale_kernels.is_empty() || self.scale_kernels.iter().any(|k| k % 2 == 0) {
            return shape(format!("scale kernels {:?} must be non-empty and odd", self.scale_kernels));
        }
        let after_conv1 = (self.input_size + 1).checked_sub(self.conv1_kernel);
        let after_pool = after_conv1.and_then(|s| (s + 1).checked_sub(self.pool));
        let after_conv3 = after_pool.and_then(|s| (s + 1).checked_sub(self.conv3_kernel));
        if self.conv1_kernel == 0 || self.pool == 0 || self.conv3_kernel == 0 || after_conv3 != Some(1) {
            return shape(format!(
                "input {} with conv1 {}, pool {}, conv3 {} does not reduce to 1x1",
                self.input_size, self.conv1_kernel, self.pool, self.conv3_kernel
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetParams {
    pub arch: Architecture,
    pub conv1: Conv,
    pub scales: Vec<Conv>,
    pub conv3: Conv,
    pub brelu_lo: f64,
    pub brelu_hi: f64,
}

impl NetParams {
    /// All-zero weights for `arch` with BReLU bounds [0, 1].
    pub fn zeros(arch: Architecture) -> Result<Self> {
        arch.validate()?;
        let m = arch.maxout_maps();
        Ok(Self {
            conv1: Conv::zeros(arch.conv1_maps, arch.in_channels, arch.conv1_kernel),
            scales: arch.scale_kernels.iter().map(|&k| Conv::zeros(m, m, k)).collect(),
            conv3: Conv::zeros(1, arch.concat_maps(), arch.conv3_kernel),
            arch,
            brelu_lo: 0.0,
            brelu_hi: 1.0,
        })
    }

    /// Weights uniform in `±scale/√fan_in`; biases zero except the output
    /// bias, which starts at the BReLU midpoint.
    pub fn init(arch: Architecture, scale: f64, seed: u64) -> Result<Self> {
        let mut p = Self::zeros(arch)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for conv in p.convs_mut() {
            let bound = scale / (conv.fan_in() as f64).sqrt();
            for w in conv.weights.iter_mut() {
                *w = rng.random_range(-bound..=bound);
            }
        }
        p.conv3.bias[0] = (p.brelu_lo + p.brelu_hi) / 2.0;
        Ok(p)
    }

    pub fn convs(&self) -> impl Iterator<Item = &Conv> {
        std::iter::once(&self.conv1).chain(&self.scales).chain(std::iter::once(&self.conv3))
    }

    pub fn convs_mut(&mut self) -> impl Iterator<Item = &mut Conv> {
        std::iter::once(&mut self.conv1)
            .chain(self.scales.iter_mut())
            .chain(std::iter::once(&mut self.conv3))
    }

    pub fn num_weights(&self) -> usize {
        self.convs().map(Conv::len).sum()
    }

    /// Weights then biases of each conv, in declaration order.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_weights());
        for c in self.convs() {
            v.extend_from_slice(&c.weights);
            v.extend_from_slice(&c.bias);
        }
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_weights() {
            return Err(Error::Shape(format!(
                "expected {} weights, got {}",
                self.num_weights(),
                flat.len()
            )));
        }
        let mut off = 0;
        for c in self.convs_mut() {
            let (nw, nb) = (c.weights.len(), c.bias.len());
            c.weights.copy_from_slice(&flat[off..off + nw]);
            c.bias.copy_from_slice(&flat[off + nw..off + nw + nb]);
            off += nw + nb;
        }
        Ok(())
    }

    fn zeroed_like(&self) -> Self {
        let mut g = self.clone();
        for c in g.convs_mut() {
            c.weights.fill(0.0);
            c.bias.fill(0.0);
        }
        g
    }
}

/// Intermediate activations kept for the backward pass.
#[derive(Debug, Clone)]
pub struct Trace {
    input: Tensor,
    maxout: Tensor,
    maxout_arg: Vec<usize>,
    concat: Tensor,
    pooled: Tensor,
    pool_arg: Vec<usize>,
    /// Pre-activation of the BReLU.
    pub z: f64,
    pub t: f64,
}

impl Trace {
    /// Which branch every kinked unit took: maxout winners, pool winners and
    /// the BReLU region.
    pub fn switch_pattern(&self, lo: f64, hi: f64) -> Vec<usize> {
        let region = if self.z < lo {
            0
        } else if self.z > hi {
            2
        } else {
            1
        };
        self.maxout_arg
            .iter()
            .chain(&self.pool_arg)
            .copied()
            .chain(std::iter::once(region))
            .collect()
    }
}

pub fn image_to_tensor(patch: &Image) -> Tensor {
    let (w, h) = patch.dims();
    let mut t = Tensor::zeros(3, h, w);
    for (i, px) in patch.pixels().enumerate() {
        for (c, v) in px.into_iter().enumerate() {
            t.data[c * w * h + i] = v;
        }
    }
    t
}

pub fn trace(params: &NetParams, patch: &Image) -> Result<Trace> {
    let s = params.arch.input_size;
    if patch.dims() != (s, s) {
        return Err(Error::Shape(format!(
            "patch {:?} does not match network input {s}x{s}",
            patch.dims()
        )));
    }
    let input = image_to_tensor(patch);
    let c1 = params.conv1.forward(&input, 0);
    let (maxout, maxout_arg) = maxout_tensor(&c1, params.arch.group_size);
    let mut concat = Tensor::zeros(params.arch.concat_maps(), maxout.h, maxout.w);
    let per = maxout.h * maxout.w;
    for (si, conv) in params.scales.iter().enumerate() {
        let out = conv.forward(&maxout, conv.k / 2);
        let off = si * conv.out_c * per;
        concat.data[off..off + out.data.len()].copy_from_slice(&out.data);
    }
    let (pooled, pool_arg) = max_pool(&concat, params.arch.pool);
    let z = params.conv3.forward(&pooled, 0).data[0];
    Ok(Trace {
        input,
        maxout,
        maxout_arg,
        concat,
        pooled,
        pool_arg,
        z,
        t: brelu(z, params.brelu_lo, params.brelu_hi),
    })
}

pub fn forward(params: &NetParams, patch: &Image) -> Result<f64> {
    Ok(trace(params, patch)?.t)
}

/// Adds `d_t · ∂t/∂θ` for one traced sample into `grad`.
fn backward(params: &NetParams, tr: &Trace, d_t: f64, grad: &mut NetParams) {
    let d_z = d_t * brelu_grad(tr.z, params.brelu_lo, params.brelu_hi);
    if d_z == 0.0 {
        return;
    }
    let g_out = Tensor {
        c: 1,
        h: 1,
        w: 1,
        data: vec![d_z],
    };
    let d_pooled = params
        .conv3
        .backward(&tr.pooled, 0, &g_out, &mut grad.conv3, true)
        .expect("input grad requested");

    let mut d_concat = Tensor::zeros(tr.concat.c, tr.concat.h, tr.concat.w);
    for (o, &src) in tr.pool_arg.iter().enumerate() {
        d_concat.data[src] += d_pooled.data[o];
    }

    let per = tr.maxout.h * tr.maxout.w;
    let mut d_maxout = Tensor::zeros(tr.maxout.c, tr.maxout.h, tr.maxout.w);
    for (si, conv) in params.scales.iter().enumerate() {
        let off = si * conv.out_c * per;
        let g = Tensor {
            c: conv.out_c,
            h: tr.maxout.h,
            w: tr.maxout.w,
            data: d_concat.data[off..off + conv.out_c * per].to_vec(),
        };
        let d_in = conv
            .backward(&tr.maxout, conv.k / 2, &g, &mut grad.scales[si], true)
            .expect("input grad requested");
        for (a, b) in d_maxout.data.iter_mut().zip(d_in.data) {
            *a += b;
        }
    }

    let mut d_c1 = Tensor::zeros(params.arch.conv1_maps, tr.maxout.h, tr.maxout.w);
    for (j, &winner) in tr.maxout_arg.iter().enumerate() {
        let pos = j % per;
        d_c1.data[winner * per + pos] += d_maxout.data[j];
    }
    params.conv1.backward(&tr.input, 0, &d_c1, &mut grad.conv1, false);
}

/// Mean squared error over the batch and its exact gradient.
pub fn loss_and_gradients(params: &NetParams, batch: &[PatchSample]) -> Result<(f64, NetParams)> {
    use rayon::prelude::*;
    if batch.is_empty() {
        return Err(Error::Param("empty batch".into()));
    }
    let n = batch.len() as f64;
    // per-sample results are summed sequentially in batch order
    let per_sample: Vec<(f64, NetParams)> = batch
        .par_iter()
        .map(|s| {
            let tr = trace(params, &s.patch)?;
            let err = tr.t - s.t_true;
            let mut g = params.zeroed_like();
            backward(params, &tr, 2.0 * err / n, &mut g);
            Ok((err * err, g))
        })
        .collect::<Result<_>>()?;
    let mut total = params.zeroed_like();
    let mut sq = 0.0;
    for (e, g) in per_sample {
        sq += e;
        for (acc, c) in total.convs_mut().zip(g.convs()) {
            for (a, b) in acc.weights.iter_mut().zip(&c.weights) {
                *a += b;
            }
            for (a, b) in acc.bias.iter_mut().zip(&c.bias) {
                *a += b;
            }
        }
    }
    Ok((sq / n, total))
}

/// Mean squared error without gradients.
pub fn mse(params: &NetParams, samples: &[PatchSample]) -> Result<f64> {
    use rayon::prelude::*;
    if samples.is_empty() {
        return Err(Error::Param("empty sample set".into()));
    }
    let errs: Vec<f64> = samples
        .par_iter()
        .map(|s| forward(params, &s.patch).map(|t| (t - s.t_true).powi(2)))
        .collect::<Result<_>>()?;
    Ok(errs.iter().sum::<f64>() / samples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_architecture_is_consistent() {
        let arch = Architecture::default();
        arch.validate().unwrap();
        let p = NetParams::zeros(arch).unwrap();
        assert_eq!(p.conv1.weights.len(), 16 * 3 * 25);
        assert_eq!(p.scales.len(), 3);
        assert_eq!(p.conv3.weights.len(), 12 * 36);
        let bad = Architecture {
            conv3_kernel: 5,
            ..Architecture::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn flat_round_trip() {
        let p = NetParams::init(Architecture::default(), 1.0, 3).unwrap();
        let mut q = NetParams::zeros(Architecture::default()).unwrap();
        q.set_flat(&p.to_flat()).unwrap();
        assert_eq!(p, q);
        assert!(q.set_flat(&[0.0; 3]).is_err());
    }

    #[test]
    fn output_bounded_and_deterministic() {
        let p = NetParams::init(Architecture::default(), 5.0, 8).unwrap();
        let patch = Image::from_fn(16, 16, |x, y| [x as f64 / 16.0, y as f64 / 16.0, 0.5]);
        let a = forward(&p, &patch).unwrap();
        assert!((0.0..=1.0).contains(&a));
        assert_eq!(a.to_bits(), forward(&p, &patch).unwrap().to_bits());
        assert!(forward(&p, &Image::filled(15, 16, [0.0; 3])).is_err());
    }

    /// Delta kernels and g=1: conv1 keeps the red channel at the kernel centre,
    /// every scale is identity, pooling of a constant is that constant, and the
    /// output sums `w3` over the pooled maps.
    #[test]
    fn degenerate_linear_network_by_hand() {
        let arch = Architecture {
            conv1_maps: 1,
            group_size: 1,
            ..Architecture::default()
        };
        let mut p = NetParams::zeros(arch).unwrap();
        p.conv1.weights[2 * 5 + 2] = 1.0;
        for conv in &mut p.scales {
            let k = conv.k;
            conv.weights[(k / 2) * k + k / 2] = 1.0;
        }
        let w3 = 0.01;
        p.conv3.weights.fill(w3);
        let c = 0.4;
        let patch = Image::filled(16, 16, [c, 0.9, 0.1]);
        // 3 concatenated maps × 36 conv3 taps, every activation equal to c
        let expected = brelu(3.0 * 36.0 * w3 * c, 0.0, 1.0);
        assert!((forward(&p, &patch).unwrap() - expected).abs() < 1e-12);
        p.conv3.bias[0] = 2.0;
        assert_eq!(forward(&p, &patch).unwrap(), 1.0);
    }

    #[test]
    fn perfect_fit_has_zero_gradient() {
        let p = NetParams::init(Architecture::default(), 1.0, 4).unwrap();
        let patch = Image::from_fn(16, 16, |x, y| [0.3, x as f64 / 20.0, y as f64 / 20.0]);
        let t = forward(&p, &patch).unwrap();
        let (loss, g) = loss_and_gradients(&p, &[PatchSample { patch, t_true: t }]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.to_flat().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn duplicated_batch_is_equivalent() {
        let p = NetParams::init(Architecture::default(), 1.0, 5).unwrap();
        let batch: Vec<PatchSample> = (0..3)
            .map(|i| PatchSample {
                patch: Image::from_fn(16, 16, |x, y| [((x + i) % 5) as f64 / 5.0, 0.2, y as f64 / 16.0]),
                t_true: 0.2 + 0.2 * i as f64,
            })
            .collect();
        let doubled: Vec<_> = batch.iter().chain(&batch).cloned().collect();
        let (l1, g1) = loss_and_gradients(&p, &batch).unwrap();
        let (l2, g2) = loss_and_gradients(&p, &doubled).unwrap();
        assert!((l1 - l2).abs() < 1e-15);
        for (a, b) in g1.to_flat().iter().zip(g2.to_flat()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(loss_and_gradients(&p, &[]).is_err());
    }
}
