//! Visible-edge indices `e` and `r` on controlled constructions.
//!
//! ```text
//! cargo run --example edge_metrics
//! ```

use hazebench::metrics::{e_index, r_index, sobel_magnitude, EdgeMetricConfig};
use hazebench::Image;

fn gray(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> Image {
    Image::from_fn(w, h, |x, y| [f(x, y); 3])
}

fn main() -> hazebench::Result<()> {
    let cfg = EdgeMetricConfig::default();
    let one_step = gray(32, 16, |x, _| if x < 16 { 0.2 } else { 0.8 });
    let two_steps = gray(32, 16, |x, _| if (8..24).contains(&x) { 0.8 } else { 0.2 });
    println!("peak sobel magnitude of a 0.6 step: {:.3}", sobel_magnitude(&one_step.luminance()).data().iter().cloned().fold(0.0, f64::max));
    println!("e(one step → two steps) = {:?}", e_index(&one_step, &two_steps, &cfg)?);

    let base = gray(32, 32, |x, y| 0.5 + 0.3 * (((x * 5 + y * 3) % 9) as f64 / 8.0 - 0.5));
    let doubled = Image::from_fn(32, 32, |x, y| [0.5 + 2.0 * (base.pixel(x, y)[0] - 0.5); 3]);
    println!("r(contrast × 2) = {:?}", r_index(&base, &doubled, &cfg)?);
    println!("identical: e = {:?}, r = {:?}", e_index(&base, &base, &cfg)?, r_index(&base, &base, &cfg)?);

    // a flat reference has no visible edges, so e is undefined and ratios clamp
    let flat = gray(32, 32, |_, _| 0.5);
    let step = gray(32, 32, |x, _| if x < 16 { 0.0 } else { 1.0 });
    println!("flat reference: e = {:?}, r = {:?}", e_index(&flat, &step, &cfg)?, r_index(&flat, &step, &cfg)?);
    Ok(())
}
