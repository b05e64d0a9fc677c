//! Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//!
//! Runs without the libtest harness so the summary is always printed. The
//! dataset-present criterion needs `HAZEBENCH_CHIC_MANIFEST` pointing at a
//! manifest for the real level 5/7/9 captures, with checkers named `back`
//! and `table`; without it that criterion is reported as SKIP.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hazebench::bench::{load_manifest, run_benchmark, Method, RunConfig, TwoPlaneScene};
use hazebench::dehaze::dark_channel;
use hazebench::koschmieder::{apply_haze, invert_haze, transmission_from_depth};
use hazebench::metrics::{e_index, mean_chromaticity_distance, r_index, trimmed_mean, EdgeMetricConfig, RegionMask};
use hazebench::net::gradcheck::{center_output, gradient_check};
use hazebench::net::{mse, predict_map, train_with_history, Architecture, NetParams, TrainConfig};
use hazebench::synth::{procedural_sources, procedural_texture, synthesize_patch_dataset, synthesize_scene, SynthConfig};
use hazebench::{Airlight, Beta, DepthMap, Image, Rect};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within_budget(elapsed: Duration, budget: Duration, detail: String, ok: bool) -> Outcome {
    let detail = format!("{detail}; {:.2}s (budget {}s)", elapsed.as_secs_f64(), budget.as_secs());
    verdict(ok && elapsed <= budget, detail)
}

const BETAS_E3: [f64; 3] = [103.69, 83.57, 17.84];
const DISTANCES: [f64; 2] = [7.0, 4.35];
/// Expected transmissions, rows = β, columns = distance.
const GROUND_TRUTH: [[f64; 2]; 3] = [[0.484, 0.637], [0.557, 0.695], [0.883, 0.925]];
/// Published DCP checker estimates for the real captures (back, table).
const DCP_REFERENCE: [(u8, f64, f64); 3] = [(5, 0.133, 0.262), (7, 0.255, 0.432), (9, 0.617, 0.725)];

fn ground_truth_transmission() -> Outcome {
    let mut worst: f64 = 0.0;
    for (bi, &b) in BETAS_E3.iter().enumerate() {
        for (di, &d) in DISTANCES.iter().enumerate() {
            let t = transmission_from_depth(d, Beta::from_e3(b).unwrap()).unwrap();
            worst = worst.max((t - GROUND_TRUTH[bi][di]).abs());
        }
    }
    verdict(worst <= 0.001, format!("max deviation {worst:.5} over 6 entries"))
}

fn koschmieder_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (w, h) = (rng.random_range(1..24), rng.random_range(1..24));
        let data: Vec<f64> = (0..w * h * 3).map(|_| rng.random()).collect();
        let img = Image::new(w, h, data).unwrap();
        let t = rng.random_range(0.1..=1.0);
        let a = Airlight::new([rng.random_range(0.05..=1.0), rng.random_range(0.05..=1.0), rng.random_range(0.05..=1.0)]).unwrap();
        let back = invert_haze(&apply_haze(&img, t, a).unwrap(), t, a, 0.1).unwrap();
        for (x, y) in img.data().iter().zip(back.data()) {
            worst = worst.max((x - y).abs());
        }
    }
    within_budget(start.elapsed(), Duration::from_secs(1), format!("max |I - I'| {worst:.2e} over 100 triples"), worst <= 1e-6)
}

fn oracle_trimmed_mean(values: &[f64], trim: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = (trim * v.len() as f64).floor() as usize;
    let kept = &v[k..v.len() - k];
    kept.iter().sum::<f64>() / kept.len() as f64
}

fn trimmed_mean_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mismatches = 0;
    let mut small = 0;
    for i in 0..1000 {
        let n = if i % 4 == 0 { rng.random_range(1..7) } else { rng.random_range(1..2000) };
        small += usize::from(n < 7);
        // coarse grid for ties on odd draws
        let values: Vec<f64> = (0..n)
            .map(|_| if i % 2 == 1 { rng.random_range(0..5) as f64 / 4.0 } else { rng.random() })
            .collect();
        for trim in [0.0, 0.15, 0.3] {
            if trimmed_mean(&values, trim).unwrap() != oracle_trimmed_mean(&values, trim) {
                mismatches += 1;
            }
        }
    }
    within_budget(
        start.elapsed(),
        Duration::from_secs(1),
        format!("{mismatches} mismatches over 1000 vectors x 3 trims ({small} with n < 7)"),
        mismatches == 0,
    )
}

fn dark_channel_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut mismatches = 0;
    for _ in 0..50 {
        let data: Vec<f64> = (0..16 * 16 * 3).map(|_| rng.random()).collect();
        let img = Image::new(16, 16, data).unwrap();
        for r in [0usize, 1, 3] {
            let fast = dark_channel(&img, r);
            for y in 0..16usize {
                for x in 0..16usize {
                    let mut m = f64::INFINITY;
                    for yy in y.saturating_sub(r)..=(y + r).min(15) {
                        for xx in x.saturating_sub(r)..=(x + r).min(15) {
                            for c in img.pixel(xx, yy) {
                                m = m.min(c);
                            }
                        }
                    }
                    if fast.get(x, y) != m {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    within_budget(start.elapsed(), Duration::from_secs(1), format!("{mismatches} mismatching pixels over 50 images x radii {{0,1,3}}"), mismatches == 0)
}

fn mininet_gradient_check() -> Outcome {
    let start = Instant::now();
    let sources = procedural_sources(4, 48, 5);
    let mut worst: f64 = 0.0;
    let (mut checked, mut skipped) = (0, 0);
    for draw in 0..100u64 {
        let batch = synthesize_patch_dataset(&sources, &SynthConfig { count: 2, seed: 1000 + draw, ..Default::default() }).unwrap();
        let mut params = NetParams::init(Architecture::default(), 1.0, draw).unwrap();
        center_output(&mut params, &batch[0].patch).unwrap();
        let g = gradient_check(&params, &batch, 30, 1e-5, 1e-6, draw).unwrap();
        worst = worst.max(g.max_relative_error);
        checked += g.checked;
        skipped += g.skipped;
    }
    within_budget(
        start.elapsed(),
        Duration::from_secs(30),
        format!("max relative error {worst:.2e} over 100 draws ({checked} components checked, {skipped} skipped at kinks)"),
        worst < 1e-4 && checked > 1000,
    )
}

fn mininet_training() -> Outcome {
    let start = Instant::now();
    let train_set = synthesize_patch_dataset(&procedural_sources(8, 128, 0), &SynthConfig { count: 2000, seed: 1, ..Default::default() }).unwrap();
    let test_set = synthesize_patch_dataset(&procedural_sources(4, 128, 99), &SynthConfig { count: 500, seed: 2, ..Default::default() }).unwrap();
    let cfg = TrainConfig::default();
    let init = NetParams::init(Architecture::default(), cfg.weight_init_scale, cfg.seed).unwrap();
    let (params, _) = train_with_history(init, &train_set, &cfg).unwrap();
    let held_out = mse(&params, &test_set).unwrap();

    let clear = procedural_texture(96, 64, 7);
    let depth = DepthMap::from_fn(96, 64, |_, y| Some(if y < 32 { 7.0 } else { 4.35 })).unwrap();
    let a = Airlight::white();
    let hazy = synthesize_scene(&clear, &depth, Beta::from_e3(83.57).unwrap(), a).unwrap();
    let t = predict_map(&params, &hazy, 4, None).unwrap();
    let restored = invert_haze(&hazy, &t, a, 0.1).unwrap();
    let (mae_hazy, mae_restored) = (hazy.mean_abs_diff(&clear).unwrap(), restored.mean_abs_diff(&clear).unwrap());
    within_budget(
        start.elapsed(),
        Duration::from_secs(300),
        format!("held-out MSE {held_out:.5}; scene MAE {mae_hazy:.4} -> {mae_restored:.4}"),
        held_out < 0.05 && mae_restored < mae_hazy,
    )
}

fn metric_sanity() -> Outcome {
    let start = Instant::now();
    let cfg = EdgeMetricConfig::default();
    let x = procedural_texture(48, 48, 8);
    let whole = [RegionMask::Rect(Rect::new(0, 0, 48, 48)), RegionMask::Rect(Rect::new(4, 4, 10, 10))];
    let e_same = e_index(&x, &x, &cfg).unwrap();
    let r_same = r_index(&x, &x, &cfg).unwrap();
    let d_same = mean_chromaticity_distance(&x, &x, &whole, 0.15).unwrap();

    let gray = |f: &dyn Fn(usize, usize) -> f64| Image::from_fn(32, 32, |px, py| [f(px, py); 3]);
    let base = gray(&|px, py| 0.5 + 0.3 * (((px * 5 + py * 3) % 9) as f64 / 8.0 - 0.5));
    let doubled = gray(&|px, py| 0.5 + 2.0 * (base.pixel(px, py)[0] - 0.5));
    let r2 = r_index(&base, &doubled, &cfg).unwrap().unwrap();
    let one = gray(&|px, _| if px < 16 { 0.2 } else { 0.8 });
    let two = gray(&|px, _| if (8..24).contains(&px) { 0.8 } else { 0.2 });
    let e1 = e_index(&one, &two, &cfg).unwrap();

    let ok = e_same == Some(0.0) && r_same == Some(1.0) && d_same == 0.0 && (r2 - 2.0).abs() <= 1e-6 && e1 == Some(1.0);
    within_budget(
        start.elapsed(),
        Duration::from_secs(1),
        format!("e(x,x)={e_same:?} r(x,x)={r_same:?} d(x,x)={d_same} r(2x)={r2:.9} e(2 edges)={e1:?}"),
        ok,
    )
}

fn dataset_reproduction() -> Outcome {
    let Some(path) = std::env::var_os("HAZEBENCH_CHIC_MANIFEST") else {
        return Outcome::Skip("HAZEBENCH_CHIC_MANIFEST not set; real captures unavailable".into());
    };
    let manifest = match load_manifest(&path) {
        Ok(m) => m,
        Err(e) => return Outcome::Fail(format!("manifest: {e}")),
    };
    let cfg = RunConfig {
        methods: vec![Method::Dcp],
        levels: Some(vec![5, 7, 9]),
        ..Default::default()
    };
    let report = match run_benchmark(&manifest, &cfg) {
        Ok(r) => r,
        Err(e) => return Outcome::Fail(format!("benchmark: {e}")),
    };
    let mut worst_dcp: f64 = 0.0;
    let mut gt_ok = true;
    for (level, back, table) in DCP_REFERENCE {
        let Some(row) = report.row(Method::Dcp, level) else {
            return Outcome::Fail(format!("no row for level {level}"));
        };
        let bi = [5u8, 7, 9].iter().position(|&l| l == level).expect("reference level");
        for (name, reference, di) in [("back", back, 0), ("table", table, 1)] {
            let Some(c) = row.checkers.iter().find(|c| c.name == name) else {
                return Outcome::Fail(format!("checker `{name}` missing"));
            };
            let Some(t) = c.t_estimated else {
                return Outcome::Fail(format!("level {level} {name}: no estimate ({:?})", row.failure));
            };
            worst_dcp = worst_dcp.max((t - reference).abs());
            gt_ok &= format!("{:.3}", c.t_ground_truth) == format!("{:.3}", GROUND_TRUTH[bi][di]);
        }
    }
    verdict(worst_dcp <= 0.05 && gt_ok, format!("max DCP deviation {worst_dcp:.3}; ground truth matches: {gt_ok}"))
}

fn run_bench_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_hazebench"))
        .arg("--config")
        .arg(config)
        .arg("--out-dir")
        .arg(out)
        .arg("bench")
        .output()
        .map_err(|e| e.to_string())?;
    if status.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&status.stderr).into_owned())
    }
}

fn end_to_end_determinism() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let manifest = TwoPlaneScene::default().write(dir.path().join("scene")).unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, format!("manifest = {:?}\nmethods = [\"dcp\", \"fast\", \"clahe\"]\n", manifest.display().to_string())).unwrap();
    let outs: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("run{i}"))).collect();
    for o in &outs {
        if let Err(e) = run_bench_cli(&config, o) {
            return Outcome::Fail(format!("bench failed: {e}"));
        }
    }
    let mut files = vec!["report.csv".to_string()];
    files.extend([5, 7, 9].map(|l| format!("chromaticity_{l}.svg")));
    for f in &files {
        let a = std::fs::read(outs[0].join(f));
        let b = std::fs::read(outs[1].join(f));
        match (a, b) {
            (Ok(a), Ok(b)) if a == b => {}
            (Ok(_), Ok(_)) => return Outcome::Fail(format!("{f} differs between runs")),
            _ => return Outcome::Fail(format!("{f} missing")),
        }
    }
    within_budget(start.elapsed(), Duration::from_secs(60), format!("{} files byte-identical across two runs", files.len()), true)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("ground-truth transmission reproduction", ground_truth_transmission),
        ("koschmieder round trip", koschmieder_round_trip),
        ("trimmed-mean oracle equivalence", trimmed_mean_oracle),
        ("dark-channel oracle equivalence", dark_channel_oracle),
        ("mini-net gradient check", mininet_gradient_check),
        ("mini-net desk-scale training", mininet_training),
        ("metric sanity suite", metric_sanity),
        ("dataset-present reproduction", dataset_reproduction),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                failed += 1;
                ("FAIL", d)
            }
            Outcome::Skip(d) => ("SKIP", d),
        };
        println!("[{tag}] {}. {name}: {detail}", i + 1);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
