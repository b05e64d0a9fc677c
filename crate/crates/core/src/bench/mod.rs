//! Benchmark harness: scene manifests, the method × level evaluation and its
//! CSV/SVG/text reports.

pub mod config;
pub mod manifest;
pub mod report;
pub mod run;
pub mod svg;
pub mod synthetic;

pub use config::{Method, MininetConfig, RunConfig, SynthSettings};
pub use manifest::{load_manifest, parse_manifest, CheckerEntry, LevelEntry, PatchRoi, SceneManifest};
pub use report::{emit_csv, run_meta, write_report};
pub use run::{run_benchmark, BenchReport, CheckerResult, ChromaSeries, ReportRow};
pub use svg::emit_chromaticity_svg;
pub use synthetic::TwoPlaneScene;
