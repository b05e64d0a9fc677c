//! Dense tensors and the layer primitives of the regressor.

use crate::error::{Error, Result};

/// Channel-major `c × h × w` tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(c: usize, h: usize, w: usize) -> Self {
        Self {
            c,
            h,
            w,
            data: vec![0.0; c * h * w],
        }
    }

    #[inline]
    pub fn idx(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.h + y) * self.w + x
    }

    pub fn channel(&self, c: usize) -> &[f64] {
        let n = self.h * self.w;
        &self.data[c * n..(c + 1) * n]
    }
}

/// Bilateral ReLU: `min(max(x, lo), hi)`.
pub fn brelu(x: f64, lo: f64, hi: f64) -> f64 {
    x.max(lo).min(hi)
}

/// Subgradient of [`brelu`]: 1 on `[lo, hi]`, 0 outside.
pub fn brelu_grad(x: f64, lo: f64, hi: f64) -> f64 {
    if (lo..=hi).contains(&x) {
        1.0
    } else {
        0.0
    }
}

/// Element-wise max over consecutive groups of `group_size` maps.
pub fn maxout(maps: &[Vec<f64>], group_size: usize) -> Result<Vec<Vec<f64>>> {
    if group_size == 0 || !maps.len().is_multiple_of(group_size) {
        return Err(Error::Shape(format!(
            "{} maps not divisible into groups of {group_size}",
            maps.len()
        )));
    }
    let len = maps.first().map_or(0, Vec::len);
    if maps.iter().any(|m| m.len() != len) {
        return Err(Error::Shape("maxout maps differ in size".into()));
    }
    Ok(maps
        .chunks(group_size)
        .map(|group| {
            (0..len)
                .map(|i| group.iter().map(|m| m[i]).fold(f64::NEG_INFINITY, f64::max))
                .collect()
        })
        .collect())
}

/// Tensor maxout; also returns the winning input channel per output sample
/// (ties go to the lowest index).
pub fn maxout_tensor(input: &Tensor, group_size: usize) -> (Tensor, Vec<usize>) {
    let groups = input.c / group_size;
    let n = input.h * input.w;
    let mut out = Tensor::zeros(groups, input.h, input.w);
    let mut arg = vec![0; groups * n];
    for j in 0..groups {
        for i in 0..n {
            let mut best = j * group_size;
            let mut val = input.data[best * n + i];
            for c in j * group_size + 1..(j + 1) * group_size {
                let v = input.data[c * n + i];
                if v > val {
                    val = v;
                    best = c;
                }
            }
            out.data[j * n + i] = val;
            arg[j * n + i] = best;
        }
    }
    (out, arg)
}

/// Stride-1 valid max pooling; returns flat input indices of the winners
/// (ties go to the first in row-major window order).
pub fn max_pool(input: &Tensor, k: usize) -> (Tensor, Vec<usize>) {
    let (oh, ow) = (input.h + 1 - k, input.w + 1 - k);
    let mut out = Tensor::zeros(input.c, oh, ow);
    let mut arg = vec![0; input.c * oh * ow];
    for c in 0..input.c {
        for y in 0..oh {
            for x in 0..ow {
                let mut best = input.idx(c, y, x);
                for dy in 0..k {
                    for dx in 0..k {
                        let i = input.idx(c, y + dy, x + dx);
                        if input.data[i] > input.data[best] {
                            best = i;
                        }
                    }
                }
                let o = out.idx(c, y, x);
                out.data[o] = input.data[best];
                arg[o] = best;
            }
        }
    }
    (out, arg)
}

/// Convolution weights `[out][in][ky][kx]` and biases `[out]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv {
    pub out_c: usize,
    pub in_c: usize,
    pub k: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Conv {
    pub fn zeros(out_c: usize, in_c: usize, k: usize) -> Self {
        Self {
            out_c,
            in_c,
            k,
            weights: vec![0.0; out_c * in_c * k * k],
            bias: vec![0.0; out_c],
        }
    }

    pub fn fan_in(&self) -> usize {
        self.in_c * self.k * self.k
    }

    pub fn len(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cross-correlation with `pad` zeros on every side.
    pub fn forward(&self, input: &Tensor, pad: usize) -> Tensor {
        let k = self.k;
        let (oh, ow) = (input.h + 2 * pad + 1 - k, input.w + 2 * pad + 1 - k);
        let mut out = Tensor::zeros(self.out_c, oh, ow);
        for o in 0..self.out_c {
            let plane = &mut out.data[o * oh * ow..(o + 1) * oh * ow];
            plane.fill(self.bias[o]);
            for i in 0..self.in_c {
                let src = input.channel(i);
                for ky in 0..k {
                    for kx in 0..k {
                        let wv = self.weights[((o * self.in_c + i) * k + ky) * k + kx];
                        for y in 0..oh {
                            let sy = y + ky;
                            if sy < pad || sy - pad >= input.h {
                                continue;
                            }
                            let row = &src[(sy - pad) * input.w..(sy - pad + 1) * input.w];
                            let dst = &mut plane[y * ow..(y + 1) * ow];
                            let x0 = pad.saturating_sub(kx);
                            let x1 = (input.w + pad).saturating_sub(kx).min(ow);
                            for x in x0..x1 {
                                dst[x] += wv * row[x + kx - pad];
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Accumulates weight/bias gradients into `grad` and returns the input gradient
    /// when `want_input` is set.
    pub fn backward(&self, input: &Tensor, pad: usize, grad_out: &Tensor, grad: &mut Conv, want_input: bool) -> Option<Tensor> {
        let k = self.k;
        let (oh, ow) = (grad_out.h, grad_out.w);
        let mut grad_in = want_input.then(|| Tensor::zeros(input.c, input.h, input.w));
        for o in 0..self.out_c {
            let g = &grad_out.data[o * oh * ow..(o + 1) * oh * ow];
            grad.bias[o] += g.iter().sum::<f64>();
            for i in 0..self.in_c {
                let src = input.channel(i);
                for ky in 0..k {
                    for kx in 0..k {
                        let widx = ((o * self.in_c + i) * k + ky) * k + kx;
                        let wv = self.weights[widx];
                        let mut acc = 0.0;
                        for y in 0..oh {
                            let sy = y + ky;
                            if sy < pad || sy - pad >= input.h {
                                continue;
                            }
                            let row_off = (sy - pad) * input.w;
                            let x0 = pad.saturating_sub(kx);
                            let x1 = (input.w + pad).saturating_sub(kx).min(ow);
                            for x in x0..x1 {
                                let si = row_off + x + kx - pad;
                                let go = g[y * ow + x];
                                acc += go * src[si];
                                if let Some(gi) = grad_in.as_mut() {
                                    gi.data[i * input.h * input.w + si] += go * wv;
                                }
                            }
                        }
                        grad.weights[widx] += acc;
                    }
                }
            }
        }
        grad_in
    }
}
