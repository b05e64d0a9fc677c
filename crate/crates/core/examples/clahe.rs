//! Contrast-limited adaptive histogram equalization on the luminance of a
//! hazy image for a range of clip limits.
//!
//! ```text
//! cargo run --release --example clahe [out_dir]
//! ```

use hazebench::dehaze::{clahe_dehaze, ClaheConfig};
use hazebench::io::{write_image, BitDepth};
use hazebench::koschmieder::apply_haze;
use hazebench::metrics::{e_index, r_index, EdgeMetricConfig};
use hazebench::synth::procedural_texture;
use hazebench::Airlight;

fn main() -> hazebench::Result<()> {
    let clear = procedural_texture(128, 128, 3);
    let hazy = apply_haze(&clear, 0.35, Airlight::gray(0.9)?)?;
    let edges = EdgeMetricConfig::default();
    let show = |v: Option<f64>| v.map_or("n/a".into(), |x| format!("{x:.3}"));
    for clip in [1.5, 2.0, 4.0, 8.0] {
        let cfg = ClaheConfig { clip_limit: clip, ..Default::default() };
        let out = clahe_dehaze(&hazy, &cfg)?;
        println!(
            "clip {clip:>3}: e {}  r {}",
            show(e_index(&hazy, &out, &edges)?),
            show(r_index(&hazy, &out, &edges)?)
        );
        if let Some(dir) = std::env::args().nth(1) {
            std::fs::create_dir_all(&dir).ok();
            write_image(&out, format!("{dir}/clahe_{clip}.png"), BitDepth::Eight)?;
        }
    }
    Ok(())
}
