//! End-to-end benchmark on a generated two-plane scene: writes the scene and
//! its manifest, runs every method on levels 5/7/9 and emits the reports.
//!
//! ```text
//! cargo run --release --example synthetic_benchmark [out_dir] [mininet.hznet]
//! ```

use hazebench::bench::{load_manifest, run_benchmark, write_report, Method, RunConfig, TwoPlaneScene};

fn main() -> hazebench::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| std::env::temp_dir().join("hazebench_bench").display().to_string());
    let scene_dir = format!("{out}/scene");
    let manifest_path = TwoPlaneScene::default().write(&scene_dir)?;
    let manifest = load_manifest(&manifest_path)?;

    let mut cfg = RunConfig::default();
    if let Some(params) = args.next() {
        cfg.methods.push(Method::Mininet);
        cfg.mininet.params = Some(params.into());
    }
    let report = run_benchmark(&manifest, &cfg)?;

    println!("{:<8} {:>5} {:<6} {:>6} {:>6} {:>8}", "method", "level", "checkr", "t_est", "t_gt", "chroma");
    for row in &report.rows {
        for c in &row.checkers {
            let f = |v: Option<f64>, p: usize| v.map_or("n/a".to_string(), |x| format!("{x:.p$}"));
            println!(
                "{:<8} {:>5} {:<6} {:>6} {:>6.3} {:>8}",
                row.method.name(),
                row.level,
                c.name,
                f(c.t_estimated, 3),
                c.t_ground_truth,
                f(c.chroma_distance, 4)
            );
        }
    }
    for p in write_report(&report, &cfg, Some(&manifest_path), &out)? {
        println!("wrote {}", p.display());
    }
    Ok(())
}
