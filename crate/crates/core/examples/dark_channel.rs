//! Dark channel prior dehazing of a synthetic two-depth scene, with and
//! without guided-filter refinement. Writes PNGs when given a directory.
//!
//! ```text
//! cargo run --release --example dark_channel [out_dir]
//! ```

use hazebench::dehaze::{dark_channel, dcp_dehaze, estimate_airlight, DcpConfig};
use hazebench::io::{write_image, write_plane, BitDepth};
use hazebench::synth::{procedural_texture, synthesize_scene};
use hazebench::{Airlight, Beta, DepthMap};

fn main() -> hazebench::Result<()> {
    let (w, h) = (160, 120);
    let clear = procedural_texture(w, h, 11);
    let depth = DepthMap::from_fn(w, h, |_, y| Some(if y < h / 2 { 7.0 } else { 4.35 }))?;
    let a = Airlight::gray(0.95)?;
    let hazy = synthesize_scene(&clear, &depth, Beta::from_e3(83.57)?, a)?;

    let dark = dark_channel(&clear, 7);
    let mean_dark = dark.data().iter().sum::<f64>() / dark.data().len() as f64;
    println!("mean dark channel of the haze-free image: {mean_dark:.4}");
    println!("airlight estimated from the hazy image: {:?} (true {:?})", estimate_airlight(&hazy, 7)?.rgb(), a.rgb());

    for (name, cfg) in [
        ("raw", DcpConfig { refine: None, ..Default::default() }),
        ("guided", DcpConfig::default()),
    ] {
        let (restored, t) = dcp_dehaze(&hazy, a, &cfg)?;
        println!(
            "{name:>6}: t(back) {:.3}  t(table) {:.3}  MAE vs clear {:.4} (hazy {:.4})",
            t.get(w / 2, h / 4),
            t.get(w / 2, 3 * h / 4),
            restored.mean_abs_diff(&clear)?,
            hazy.mean_abs_diff(&clear)?
        );
        if let Some(dir) = std::env::args().nth(1) {
            std::fs::create_dir_all(&dir).ok();
            write_image(&restored, format!("{dir}/dcp_{name}.png"), BitDepth::Eight)?;
            write_plane(t.as_plane(), format!("{dir}/dcp_{name}_t.png"), BitDepth::Eight)?;
        }
    }
    println!("ground truth: t(back) {:.3}  t(table) {:.3}", (-0.08357f64 * 7.0).exp(), (-0.08357f64 * 4.35).exp());
    Ok(())
}
