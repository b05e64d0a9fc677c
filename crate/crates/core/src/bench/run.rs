use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use crate::bench::config::{Method, RunConfig};
use crate::bench::manifest::{LevelEntry, SceneManifest};
use crate::dehaze::{clahe_dehaze, dcp_dehaze, veil_dehaze, veil_transmission};
use crate::error::{Error, Result};
use crate::io::read_image;
use crate::koschmieder::{invert_haze, transmission_from_depth};
use crate::metrics::{e_index, mean_chromaticity_distance, patch_chromaticity, r_index, trimmed_mean_region, Chromaticity, RegionMask};
use crate::net::{persist, predict_map, NetParams};
use crate::raster::{Image, TransmissionMap};

/// Levels evaluated when the run config does not list any.
pub const DEFAULT_LEVELS: std::ops::RangeInclusive<u8> = 5..=9;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckerResult {
    pub name: String,
    /// Trimmed mean of the estimated transmission over the checker ROI.
    pub t_estimated: Option<f64>,
    pub t_ground_truth: f64,
    /// `|t_est − t_gt|` of the values as reported (3 decimals).
    pub abs_error: Option<f64>,
    pub chroma_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub level: u8,
    pub checkers: Vec<CheckerResult>,
    pub e_index: Option<f64>,
    pub r_index: Option<f64>,
    pub wall_time_ms: Option<f64>,
    /// Why the row has no measurements, if it failed.
    pub failure: Option<String>,
}

/// One labelled set of patch chromaticities (haze-free, hazy or a method).
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaSeries {
    pub label: String,
    pub points: Vec<(String, Chromaticity)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub scene_name: String,
    pub levels: Vec<u8>,
    /// Manifest entries of the evaluated levels, echoed into the run metadata.
    pub inputs: Vec<LevelEntry>,
    /// Ordered by method, then level.
    pub rows: Vec<ReportRow>,
    pub chroma: BTreeMap<u8, Vec<ChromaSeries>>,
}

impl BenchReport {
    pub fn row(&self, method: Method, level: u8) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.method == method && r.level == level)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }
}

pub fn select_levels(manifest: &SceneManifest, cfg: &RunConfig) -> Result<Vec<u8>> {
    let mut levels: Vec<u8> = match &cfg.levels {
        Some(req) => {
            if let Some(missing) = req.iter().find(|l| manifest.level(**l).is_none()) {
                return Err(Error::validation("levels", format!("level {missing} is not in the manifest")));
            }
            req.clone()
        }
        None => DEFAULT_LEVELS.filter(|l| manifest.level(*l).is_some()).collect(),
    };
    levels.sort_unstable();
    levels.dedup();
    if levels.is_empty() {
        return Err(Error::validation("levels", "no selected level is present in the manifest"));
    }
    Ok(levels)
}

fn load_cropped(manifest: &SceneManifest, path: &std::path::Path) -> Result<Image> {
    let img = read_image(manifest.resolve(path))?;
    match manifest.crop {
        Some(c) => img.crop(c),
        None => Ok(img),
    }
}

/// Selected chroma patches of one checker, as `(key, mask)`.
fn chroma_masks(manifest: &SceneManifest, cfg: &RunConfig) -> Vec<Vec<(String, RegionMask)>> {
    manifest
        .checkers
        .iter()
        .map(|c| {
            cfg.chroma_patches
                .iter()
                .filter_map(|&l| c.patch(l).map(|p| (format!("{}:{l}", c.name), RegionMask::Rect(p.rect()))))
                .collect()
        })
        .collect()
}

fn series(label: &str, image: &Image, masks: &[Vec<(String, RegionMask)>], trim: f64) -> Result<ChromaSeries> {
    let mut points = Vec::new();
    for (key, mask) in masks.iter().flatten() {
        points.push((key.clone(), patch_chromaticity(image, mask, trim)?));
    }
    Ok(ChromaSeries {
        label: label.to_string(),
        points,
    })
}

struct MethodOutput {
    restored: Image,
    transmission: Option<TransmissionMap>,
}

fn run_method(method: Method, hazy: &Image, level: &LevelEntry, cfg: &RunConfig, net: Option<&NetParams>) -> Result<MethodOutput> {
    let a = level.airlight()?;
    Ok(match method {
        Method::Dcp => {
            let (restored, t) = dcp_dehaze(hazy, a, &cfg.dcp)?;
            MethodOutput {
                restored,
                transmission: Some(t),
            }
        }
        Method::Fast => {
            let (restored, veil) = veil_dehaze(hazy, a, &cfg.fast)?;
            MethodOutput {
                restored,
                transmission: Some(veil_transmission(&veil, a)),
            }
        }
        Method::Clahe => MethodOutput {
            restored: clahe_dehaze(hazy, &cfg.clahe)?,
            transmission: None,
        },
        Method::Mininet => {
            let net = net.ok_or_else(|| Error::validation("mininet.params", "no trained parameters loaded"))?;
            let t = predict_map(net, hazy, cfg.mininet.stride, cfg.mininet.refine)?;
            let restored = invert_haze(hazy, &t, a, cfg.mininet.t_floor)?;
            MethodOutput {
                restored,
                transmission: Some(t),
            }
        }
    })
}

fn round3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

struct LevelInput<'a> {
    entry: &'a LevelEntry,
    hazy: std::result::Result<Image, String>,
    t_gt: Vec<f64>,
}

/// Runs every selected method on every selected level.
///
/// Failures of a single (method, level) pair are recorded in its row and do
/// not stop the run; configuration problems and an unreadable haze-free image
/// are returned as errors.
pub fn run_benchmark(manifest: &SceneManifest, cfg: &RunConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let levels = select_levels(manifest, cfg)?;
    let hazefree = load_cropped(manifest, &manifest.hazefree_path)?;
    let net = if cfg.methods.contains(&Method::Mininet) {
        let path = cfg
            .mininet
            .params
            .as_ref()
            .ok_or_else(|| Error::validation("mininet.params", "required when the mininet method is selected"))?;
        Some(persist::load(path)?)
    } else {
        None
    };
    let masks = chroma_masks(manifest, cfg);
    let trim = cfg.trim_fraction;

    let inputs: Vec<LevelInput> = levels
        .par_iter()
        .map(|&l| -> Result<LevelInput> {
            let entry = manifest.level(l).expect("selected levels exist");
            let beta = entry.beta()?;
            let t_gt = manifest
                .checkers
                .iter()
                .map(|c| transmission_from_depth(c.distance_m, beta))
                .collect::<Result<Vec<_>>>()?;
            let hazy = load_cropped(manifest, &entry.path).map_err(|e| e.to_string()).and_then(|img| {
                if img.dims() == hazefree.dims() {
                    Ok(img)
                } else {
                    Err(format!("hazy image is {:?}, haze-free is {:?}", img.dims(), hazefree.dims()))
                }
            });
            Ok(LevelInput { entry, hazy, t_gt })
        })
        .collect::<Result<_>>()?;

    let mut methods = cfg.methods.clone();
    methods.sort_unstable();
    methods.dedup();
    let jobs: Vec<(Method, usize)> = methods
        .iter()
        .flat_map(|&m| (0..inputs.len()).map(move |i| (m, i)))
        .collect();

    let results: Vec<(ReportRow, Option<ChromaSeries>)> = jobs
        .par_iter()
        .map(|&(method, i)| {
            let input = &inputs[i];
            let level = input.entry.level;
            let failed = |reason: String| {
                let checkers = manifest
                    .checkers
                    .iter()
                    .zip(&input.t_gt)
                    .map(|(c, &t)| CheckerResult {
                        name: c.name.clone(),
                        t_estimated: None,
                        t_ground_truth: t,
                        abs_error: None,
                        chroma_distance: None,
                    })
                    .collect();
                ReportRow {
                    method,
                    level,
                    checkers,
                    e_index: None,
                    r_index: None,
                    wall_time_ms: None,
                    failure: Some(reason),
                }
            };
            let hazy = match &input.hazy {
                Ok(h) => h,
                Err(reason) => return (failed(reason.clone()), None),
            };
            let start = Instant::now();
            let evaluated = run_method(method, hazy, input.entry, cfg, net.as_ref()).and_then(|out| {
                let elapsed = start.elapsed().as_secs_f64() * 1000.0;
                let mut checkers = Vec::new();
                for ((c, &t_gt), m) in manifest.checkers.iter().zip(&input.t_gt).zip(&masks) {
                    let t_est = match &out.transmission {
                        Some(t) => Some(trimmed_mean_region(t.as_plane(), &RegionMask::Rect(c.roi), trim)?),
                        None => None,
                    };
                    let patch_masks: Vec<RegionMask> = m.iter().map(|(_, mask)| mask.clone()).collect();
                    let chroma_distance = if patch_masks.is_empty() {
                        None
                    } else {
                        Some(mean_chromaticity_distance(&out.restored, &hazefree, &patch_masks, trim)?)
                    };
                    checkers.push(CheckerResult {
                        name: c.name.clone(),
                        t_estimated: t_est,
                        t_ground_truth: t_gt,
                        abs_error: t_est.map(|t| (round3(t) - round3(t_gt)).abs()),
                        chroma_distance,
                    });
                }
                let row = ReportRow {
                    method,
                    level,
                    checkers,
                    e_index: e_index(hazy, &out.restored, &cfg.edges)?,
                    r_index: r_index(hazy, &out.restored, &cfg.edges)?,
                    wall_time_ms: cfg.record_timing.then_some(elapsed),
                    failure: None,
                };
                let s = series(method.name(), &out.restored, &masks, trim)?;
                Ok((row, s))
            });
            match evaluated {
                Ok((row, s)) => (row, Some(s)),
                Err(e) => (failed(e.to_string()), None),
            }
        })
        .collect();

    let mut chroma: BTreeMap<u8, Vec<ChromaSeries>> = BTreeMap::new();
    if masks.iter().any(|m| !m.is_empty()) {
        let reference = series("haze-free", &hazefree, &masks, trim)?;
        for input in &inputs {
            let mut v = vec![reference.clone()];
            if let Ok(h) = &input.hazy {
                v.push(series("hazy", h, &masks, trim)?);
            }
            chroma.insert(input.entry.level, v);
        }
        for (row, s) in &results {
            if let Some(s) = s {
                chroma.get_mut(&row.level).expect("level present").push(s.clone());
            }
        }
    }

    Ok(BenchReport {
        scene_name: manifest.scene_name.clone(),
        inputs: inputs.iter().map(|i| i.entry.clone()).collect(),
        levels,
        rows: results.into_iter().map(|(r, _)| r).collect(),
        chroma,
    })
}
