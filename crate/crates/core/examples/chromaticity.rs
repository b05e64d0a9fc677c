//! rg chromaticity of colour-checker patches before and after haze, and the
//! mean chromaticity distance a restoration achieves.
//!
//! ```text
//! cargo run --release --example chromaticity [out.svg]
//! ```

use hazebench::bench::svg::emit_chromaticity_svg;
use hazebench::bench::{ChromaSeries, TwoPlaneScene};
use hazebench::dehaze::{dcp_dehaze, DcpConfig};
use hazebench::metrics::{mean_chromaticity_distance, patch_chromaticity, RegionMask, DEFAULT_TRIM};
use hazebench::synth::synthesize_scene;
use hazebench::Beta;

fn main() -> hazebench::Result<()> {
    let scene = TwoPlaneScene::default();
    let clear = scene.hazefree()?;
    let hazy = synthesize_scene(&clear, &scene.depth()?, Beta::from_e3(83.57)?, scene.airlight)?;
    let (restored, _) = dcp_dehaze(&hazy, scene.airlight, &DcpConfig::default())?;

    let manifest = scene.manifest(std::path::Path::new("."));
    let back = &manifest.checkers[0];
    let labels = [2u8, 6, 7, 13, 14, 16, 17, 19];
    let masks: Vec<RegionMask> = labels.iter().map(|&l| RegionMask::Rect(back.patch(l).unwrap().rect())).collect();

    let mut all = Vec::new();
    for (name, img) in [("haze-free", &clear), ("hazy", &hazy), ("dcp", &restored)] {
        let points = labels
            .iter()
            .zip(&masks)
            .map(|(l, m)| Ok((format!("back:{l}"), patch_chromaticity(img, m, DEFAULT_TRIM)?)))
            .collect::<hazebench::Result<Vec<_>>>()?;
        println!("{name:>9}: {}", points.iter().map(|(_, c)| format!("({:.3},{:.3})", c.r, c.g)).collect::<Vec<_>>().join(" "));
        all.push(ChromaSeries { label: name.into(), points });
    }
    println!(
        "mean distance to haze-free: hazy {:.4}, dcp {:.4}",
        mean_chromaticity_distance(&hazy, &clear, &masks, DEFAULT_TRIM)?,
        mean_chromaticity_distance(&restored, &clear, &masks, DEFAULT_TRIM)?
    );
    if let Some(path) = std::env::args().nth(1) {
        emit_chromaticity_svg(&all, "back checker, level 7", &path)?;
        println!("wrote {path}");
    }
    Ok(())
}
