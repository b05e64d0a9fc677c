//! Median-filter atmospheric veil restoration and the transmission it
//! implies, compared with ground truth.
//!
//! ```text
//! cargo run --release --example atmospheric_veil
//! ```

use hazebench::dehaze::{atmospheric_veil, veil_dehaze, veil_transmission, VeilConfig};
use hazebench::synth::{procedural_texture, synthesize_scene};
use hazebench::{Airlight, Beta, DepthMap};

fn main() -> hazebench::Result<()> {
    let (w, h) = (128, 96);
    let clear = procedural_texture(w, h, 5);
    let depth = DepthMap::from_fn(w, h, |_, y| Some(if y < h / 2 { 7.0 } else { 4.35 }))?;
    let a = Airlight::gray(0.95)?;
    let beta = Beta::from_e3(103.69)?;
    let hazy = synthesize_scene(&clear, &depth, beta, a)?;

    for window in [5, 10, 20] {
        let cfg = VeilConfig { window, ..Default::default() };
        let veil = atmospheric_veil(&hazy, &cfg)?;
        let (restored, _) = veil_dehaze(&hazy, a, &cfg)?;
        let t = veil_transmission(&veil, a);
        println!(
            "window {window:>2}: t(back) {:.3}  t(table) {:.3}  MAE {:.4}",
            t.get(w / 2, h / 4),
            t.get(w / 2, 3 * h / 4),
            restored.mean_abs_diff(&clear)?
        );
    }
    println!(
        "ground truth: t(back) {:.3}  t(table) {:.3}; hazy MAE {:.4}",
        (-beta.per_meter() * 7.0).exp(),
        (-beta.per_meter() * 4.35).exp(),
        hazy.mean_abs_diff(&clear)?
    );
    // windows larger than the frame are rejected
    let too_big = VeilConfig { window: 60, ..Default::default() };
    println!("window 60 on {w}x{h}: {}", atmospheric_veil(&hazy, &too_big).unwrap_err());
    Ok(())
}
