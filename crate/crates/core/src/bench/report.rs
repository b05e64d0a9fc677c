use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::config::RunConfig;
use crate::bench::run::{BenchReport, ReportRow};
use crate::bench::svg::emit_chromaticity_svg;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] = [
    "method", "level", "checker", "t_est", "t_gt", "abs_err", "chroma_dist", "e", "r", "wall_ms",
];
pub const RESULTS_FILE: &str = "report.csv";
pub const META_FILE: &str = "run_meta.txt";
pub const NOT_AVAILABLE: &str = "n/a";

fn fmt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.decimals$}"),
        _ => NOT_AVAILABLE.to_string(),
    }
}

/// One line per (method, level, checker). Transmissions and their error use
/// 3 decimals, everything else 6; missing values are `n/a`.
pub fn emit_csv(rows: &[ReportRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |e: csv::Error| Error::Format(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        for c in &row.checkers {
            w.write_record([
                row.method.name().to_string(),
                row.level.to_string(),
                c.name.clone(),
                fmt(c.t_estimated, 3),
                fmt(Some(c.t_ground_truth), 3),
                fmt(c.abs_error, 3),
                fmt(c.chroma_distance, 6),
                fmt(row.e_index, 6),
                fmt(row.r_index, 6),
                fmt(row.wall_time_ms, 6),
            ])
            .map_err(csv_err)?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Plain-text description of the run: inputs, effective configuration and
/// per-row failures. Contains nothing time-dependent.
pub fn run_meta(report: &BenchReport, cfg: &RunConfig, manifest_path: Option<&Path>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "hazebench {}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(s, "scene: {}", report.scene_name);
    if let Some(p) = manifest_path {
        let _ = writeln!(s, "manifest: {}", p.display());
    }
    let levels: Vec<String> = report.levels.iter().map(u8::to_string).collect();
    let _ = writeln!(s, "levels: {}", levels.join(","));
    let methods: Vec<&str> = cfg.methods.iter().map(|m| m.name()).collect();
    let _ = writeln!(s, "methods: {}", methods.join(","));
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "trim fraction: {}", cfg.trim_fraction);
    let _ = writeln!(
        s,
        "visible edge: sobel magnitude >= {} on luminance; gradient floor {:.6}; ratio clamp {}",
        cfg.edges.threshold,
        crate::metrics::edges::GRADIENT_FLOOR,
        cfg.edges.ratio_clamp
    );
    if cfg.methods.contains(&crate::bench::Method::Fast) {
        let _ = writeln!(s, "note: fast t_est is derived from the veil as 1 - V/mean(A)");
    }
    for l in &report.inputs {
        let _ = writeln!(
            s,
            "level {}: {} beta_e3 {} airlight (manifest) [{}, {}, {}]",
            l.level,
            l.path.display(),
            l.beta_e3,
            l.airlight[0],
            l.airlight[1],
            l.airlight[2]
        );
    }
    let failures: Vec<&ReportRow> = report.failures().collect();
    let _ = writeln!(s, "failed rows: {}", failures.len());
    for f in failures {
        let _ = writeln!(s, "  {} level {}: {}", f.method, f.level, f.failure.as_deref().unwrap_or(""));
    }
    let _ = writeln!(s, "\n[effective configuration]\n{}", cfg.to_toml());
    s
}

/// Writes `report.csv`, `run_meta.txt` and one `chromaticity_<level>.svg`
/// per level with chroma patches. Returns the written paths.
pub fn write_report(report: &BenchReport, cfg: &RunConfig, manifest_path: Option<&Path>, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    let csv_path = dir.join(RESULTS_FILE);
    emit_csv(&report.rows, &csv_path)?;
    written.push(csv_path);

    for (level, series) in &report.chroma {
        let p = dir.join(format!("chromaticity_{level}.svg"));
        emit_chromaticity_svg(series, &format!("{} — level {level}", report.scene_name), &p)?;
        written.push(p);
    }

    let meta = dir.join(META_FILE);
    fs::write(&meta, run_meta(report, cfg, manifest_path)).map_err(|e| Error::io(&meta, e))?;
    written.push(meta);
    Ok(written)
}
