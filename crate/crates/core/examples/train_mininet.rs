//! Trains the patch transmission regressor on synthetic hazy patches and
//! reports held-out error, then uses it to dehaze a synthetic scene.
//!
//! ```text
//! cargo run --release --example train_mininet [epochs] [out.hznet]
//! ```

use std::time::Instant;

use hazebench::koschmieder::invert_haze;
use hazebench::net::{mse, persist, predict_map, train_with_history, NetParams, TrainConfig};
use hazebench::synth::{procedural_sources, procedural_texture, synthesize_patch_dataset, synthesize_scene, SynthConfig};
use hazebench::{Airlight, Beta, DepthMap};

fn main() -> hazebench::Result<()> {
    let mut args = std::env::args().skip(1);
    let epochs = args.next().map_or(TrainConfig::default().epochs, |s| s.parse().expect("epochs"));
    let out = args.next();

    let sources = procedural_sources(8, 128, 0);
    let train_set = synthesize_patch_dataset(&sources, &SynthConfig { count: 2000, seed: 1, ..Default::default() })?;
    // fresh patches: different seed and unseen textures
    let held_out_sources = procedural_sources(4, 128, 99);
    let test_set = synthesize_patch_dataset(&held_out_sources, &SynthConfig { count: 500, seed: 2, ..Default::default() })?;

    let cfg = TrainConfig { epochs, ..Default::default() };
    let init = NetParams::init(Default::default(), cfg.weight_init_scale, cfg.seed)?;
    println!("{} weights; held-out mse before training {:.5}", init.num_weights(), mse(&init, &test_set)?);

    let start = Instant::now();
    let (params, history) = train_with_history(init, &train_set, &cfg)?;
    println!("trained {} epochs in {:.1}s", cfg.epochs, start.elapsed().as_secs_f64());
    for (i, m) in history.epoch_mse.iter().enumerate() {
        println!("  epoch {:2}  train mse {:.5}", i + 1, m);
    }
    println!("held-out mse after training {:.5}", mse(&params, &test_set)?);

    // whole-scene restoration: two depth planes, white airlight
    let clear = procedural_texture(96, 64, 7);
    let depth = DepthMap::from_fn(96, 64, |_, y| Some(if y < 32 { 7.0 } else { 4.35 }))?;
    let a = Airlight::white();
    let hazy = synthesize_scene(&clear, &depth, Beta::from_e3(83.57)?, a)?;
    let t = predict_map(&params, &hazy, 4, None)?;
    let restored = invert_haze(&hazy, &t, a, 0.1)?;
    println!(
        "scene MAE vs haze-free: hazy {:.4}, restored {:.4}",
        hazy.mean_abs_diff(&clear)?,
        restored.mean_abs_diff(&clear)?
    );

    if let Some(path) = out {
        persist::save(&params, &path)?;
        println!("saved {path}");
    }
    Ok(())
}
