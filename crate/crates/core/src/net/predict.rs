//! Dense transmission maps from the patch regressor.

use rayon::prelude::*;

use crate::dehaze::guided::{guided_filter, GuidedConfig};
use crate::error::{Error, Result};
use crate::net::model::{forward, NetParams};
use crate::raster::{Image, Plane, Rect, TransmissionMap};

/// Window origins along one axis; the last window is aligned to the end when
/// the stride does not land there.
fn origins(len: usize, patch: usize, stride: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=len - patch).step_by(stride).collect();
    if *v.last().expect("at least one window") != len - patch {
        v.push(len - patch);
    }
    v
}

/// Slides the network window over the image; each pixel averages the
/// predictions of all windows covering it.
pub fn predict_map(
    params: &NetParams,
    image: &Image,
    stride: usize,
    refine: Option<GuidedConfig>,
) -> Result<TransmissionMap> {
    if stride < 1 {
        return Err(Error::Param("stride must be >= 1".into()));
    }
    let s = params.arch.input_size;
    let (w, h) = image.dims();
    if w < s || h < s {
        return Err(Error::Param(format!("image {w}x{h} smaller than network input {s}x{s}")));
    }
    let xs = origins(w, s, stride);
    let ys = origins(h, s, stride);
    let windows: Vec<(usize, usize)> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| (x, y))).collect();
    let preds: Vec<f64> = windows
        .par_iter()
        .map(|&(x, y)| forward(params, &image.crop(Rect::new(x, y, s, s))?))
        .collect::<Result<_>>()?;

    let mut sum = vec![0.0; w * h];
    let mut count = vec![0u32; w * h];
    for (&(x0, y0), &t) in windows.iter().zip(&preds) {
        for y in y0..y0 + s {
            for x in x0..x0 + s {
                sum[y * w + x] += t;
                count[y * w + x] += 1;
            }
        }
    }
    let avg = Plane::new(w, h, sum.iter().zip(&count).map(|(s, &c)| s / f64::from(c)).collect())?;
    let out = match refine {
        Some(g) => guided_filter(&image.luminance(), &avg, g.radius, g.epsilon)?,
        None => avg,
    };
    Ok(TransmissionMap::clamped(&out))
}
