//! Command-line front end shared by the `hazebench` binary.
//!
//! Exit codes: 0 success, 1 invalid input or configuration, 2 runtime failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{load_manifest, run_benchmark, write_report, Method, RunConfig};
use crate::dehaze::{clahe_dehaze, dcp_dehaze, estimate_airlight, veil_dehaze, veil_transmission};
use crate::error::{Error, Result};
use crate::io::{read_image, write_image, write_plane, BitDepth};
use crate::koschmieder::invert_haze;
use crate::metrics::{e_index, mean_chromaticity_distance, r_index, RegionMask};
use crate::net::{mse, persist, predict_map, train_with_history, NetParams};
use crate::raster::{Airlight, Image, Rect};
use crate::synth::{export_dataset, import_dataset, procedural_sources, synthesize_patch_dataset, SynthConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

/// Procedural source textures used when `synth`/`train` get no images.
const PROCEDURAL_SOURCES: usize = 8;
const PROCEDURAL_SIZE: usize = 128;

#[derive(Debug, Parser)]
#[command(name = "hazebench", version, about = "Dehazing toolkit and benchmark harness")]
pub struct Cli {
    /// Seed for every random draw (overrides the config file).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate hazy patches with known transmission.
    Synth {
        /// Haze-free source images; procedural textures when omitted.
        sources: Vec<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        patch_size: Option<usize>,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        /// Airlight as `r,g,b`.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        airlight: Option<Vec<f64>>,
    },
    /// Train the transmission regressor.
    Train {
        /// Dataset written by `synth`; generated in memory when omitted.
        #[arg(long)]
        dataset: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        batch_size: Option<usize>,
        /// Parameter file to write (default `<out-dir>/mininet.hznet`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Restore one image and write `<stem>.dehazed.png` and `<stem>.tmap.png`.
    Dehaze {
        input: PathBuf,
        #[arg(long, default_value = "dcp")]
        method: String,
        /// Airlight as `r,g,b`; estimated from the dark channel when omitted.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        airlight: Option<Vec<f64>>,
        /// Trained parameters for `--method mininet`.
        #[arg(long)]
        params: Option<PathBuf>,
    },
    /// Visible-edge indices and chromaticity distance of a restored image
    /// against its hazy input.
    Metrics { hazy: PathBuf, restored: PathBuf },
    /// Run the benchmark described by a scene manifest.
    Bench {
        /// Scene manifest; falls back to `manifest` in the config file.
        manifest: Option<PathBuf>,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                EXIT_INVALID
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

fn airlight_arg(v: &Option<Vec<f64>>) -> Result<Option<Airlight>> {
    v.as_ref()
        .map(|v| match v.as_slice() {
            &[r, g, b] => Airlight::new([r, g, b]).map_err(|e| Error::validation("airlight", e.to_string())),
            _ => Err(Error::validation("airlight", format!("expected r,g,b, got {} values", v.len()))),
        })
        .transpose()
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.train.seed = cfg.seed;
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: &RunConfig, fallback: &str) -> PathBuf {
    cli.out_dir
        .clone()
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn synth_config(cfg: &RunConfig) -> Result<SynthConfig> {
    let s = &cfg.synth;
    Ok(SynthConfig {
        patch_size: s.patch_size,
        count: s.count,
        t_range: (s.t_min, s.t_max),
        airlight: Airlight::new(s.airlight).map_err(|e| Error::validation("synth.airlight", e.to_string()))?,
        seed: cfg.seed,
    })
}

fn sources(paths: &[PathBuf], seed: u64) -> Result<Vec<Image>> {
    if paths.is_empty() {
        Ok(procedural_sources(PROCEDURAL_SOURCES, PROCEDURAL_SIZE, seed))
    } else {
        paths.iter().map(read_image).collect()
    }
}

fn execute(cli: &Cli) -> Result<()> {
    let mut cfg = load_config(cli)?;
    match &cli.command {
        Command::Synth {
            sources: paths,
            count,
            patch_size,
            t_min,
            t_max,
            airlight,
        } => {
            let s = &mut cfg.synth;
            s.count = count.unwrap_or(s.count);
            s.patch_size = patch_size.unwrap_or(s.patch_size);
            s.t_min = t_min.unwrap_or(s.t_min);
            s.t_max = t_max.unwrap_or(s.t_max);
            if let Some(a) = airlight_arg(airlight)? {
                s.airlight = a.rgb();
            }
            let sc = synth_config(&cfg)?;
            let samples = synthesize_patch_dataset(&sources(paths, cfg.seed)?, &sc)?;
            let dir = out_dir(cli, &cfg, "dataset");
            export_dataset(&samples, &dir)?;
            println!("wrote {} patches to {}", samples.len(), dir.display());
        }
        Command::Train {
            dataset,
            count,
            epochs,
            learning_rate,
            batch_size,
            output,
        } => {
            let t = &mut cfg.train;
            t.epochs = epochs.unwrap_or(t.epochs);
            t.learning_rate = learning_rate.unwrap_or(t.learning_rate);
            t.batch_size = batch_size.unwrap_or(t.batch_size);
            cfg.synth.count = count.unwrap_or(cfg.synth.count);
            cfg.validate()?;
            let samples = match dataset {
                Some(d) => import_dataset(d)?,
                None => synthesize_patch_dataset(&sources(&[], cfg.seed)?, &synth_config(&cfg)?)?,
            };
            let init = NetParams::init(Default::default(), cfg.train.weight_init_scale, cfg.seed)?;
            let (params, history) = train_with_history(init, &samples, &cfg.train)?;
            let path = output
                .clone()
                .unwrap_or_else(|| out_dir(cli, &cfg, ".").join("mininet.hznet"));
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            persist::save(&params, &path)?;
            println!(
                "trained on {} patches: mse {:.6} -> {:.6}; saved {}",
                samples.len(),
                history.initial_mse,
                mse(&params, &samples)?,
                path.display()
            );
        }
        Command::Dehaze {
            input,
            method,
            airlight,
            params,
        } => {
            let method: Method = method.parse()?;
            let hazy = read_image(input)?;
            let a = match airlight_arg(airlight)? {
                Some(a) => a,
                None => estimate_airlight(&hazy, cfg.dcp.patch_radius)?,
            };
            let (restored, tmap) = match method {
                Method::Dcp => {
                    let (r, t) = dcp_dehaze(&hazy, a, &cfg.dcp)?;
                    (r, Some(t.into_plane()))
                }
                Method::Fast => {
                    let (r, v) = veil_dehaze(&hazy, a, &cfg.fast)?;
                    (r, Some(veil_transmission(&v, a).into_plane()))
                }
                Method::Clahe => (clahe_dehaze(&hazy, &cfg.clahe)?, None),
                Method::Mininet => {
                    let p = params
                        .as_ref()
                        .or(cfg.mininet.params.as_ref())
                        .ok_or_else(|| Error::validation("params", "--params is required for mininet"))?;
                    let net = persist::load(p)?;
                    let t = predict_map(&net, &hazy, cfg.mininet.stride, cfg.mininet.refine)?;
                    (invert_haze(&hazy, &t, a, cfg.mininet.t_floor)?, Some(t.into_plane()))
                }
            };
            let dir = cli
                .out_dir
                .clone()
                .or_else(|| cfg.out_dir.clone())
                .unwrap_or_else(|| input.parent().map(Path::to_path_buf).unwrap_or_default());
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into());
            let out = dir.join(format!("{stem}.dehazed.png"));
            write_image(&restored, &out, BitDepth::Eight)?;
            println!("wrote {}", out.display());
            if let Some(t) = tmap {
                let tp = dir.join(format!("{stem}.tmap.png"));
                write_plane(&t, &tp, BitDepth::Eight)?;
                println!("wrote {}", tp.display());
            }
        }
        Command::Metrics { hazy, restored } => {
            let h = read_image(hazy)?;
            let r = read_image(restored)?;
            let show = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.6}"));
            println!("e {}", show(e_index(&h, &r, &cfg.edges)?));
            println!("r {}", show(r_index(&h, &r, &cfg.edges)?));
            // without a manifest the whole frame is one patch
            let whole = RegionMask::Rect(Rect::new(0, 0, h.width(), h.height()));
            let d = mean_chromaticity_distance(&r, &h, &[whole], cfg.trim_fraction)?;
            println!("chroma_dist {d:.6}");
        }
        Command::Bench { manifest } => {
            let path = manifest
                .clone()
                .or_else(|| cfg.manifest.clone())
                .ok_or_else(|| Error::validation("manifest", "pass a manifest path or set `manifest` in the config"))?;
            let m = load_manifest(&path)?;
            let report = run_benchmark(&m, &cfg)?;
            let dir = out_dir(cli, &cfg, "bench_out");
            let written = write_report(&report, &cfg, Some(&path), &dir)?;
            for p in written {
                println!("wrote {}", p.display());
            }
            let failed = report.failures().count();
            if failed > 0 {
                eprintln!("{failed} (method, level) rows failed; see run_meta.txt");
            }
        }
    }
    Ok(())
}
