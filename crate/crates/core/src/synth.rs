//! Synthetic hazy data: patch datasets with known transmission, depth-driven
//! scenes, and procedural haze-free textures.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::io::{read_image, write_image, BitDepth};
use crate::koschmieder::{apply_haze, transmission_from_depth_map};
use crate::raster::{Airlight, Beta, DepthMap, Image, Rect};

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSample {
    pub patch: Image,
    pub t_true: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub patch_size: usize,
    pub count: usize,
    pub t_range: (f64, f64),
    pub airlight: Airlight,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            patch_size: 16,
            count: 2000,
            t_range: (0.05, 1.0),
            airlight: Airlight::white(),
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.t_range;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::Param(format!("t_range ({lo}, {hi}) must satisfy 0 < min <= max <= 1")));
        }
        if self.count < 1 {
            return Err(Error::Param("count must be >= 1".into()));
        }
        if self.patch_size < 1 {
            return Err(Error::Param("patch_size must be >= 1".into()));
        }
        Ok(())
    }
}

/// Draw of one sample: source index, crop origin and transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchDraw {
    pub source: usize,
    pub x: usize,
    pub y: usize,
    pub t: f64,
}

/// The seeded (source, location, t) sequence behind a dataset.
pub fn draw_sequence(sources: &[Image], cfg: &SynthConfig) -> Result<Vec<PatchDraw>> {
    cfg.validate()?;
    if sources.is_empty() {
        return Err(Error::Param("no source images".into()));
    }
    let s = cfg.patch_size;
    if let Some((i, img)) = sources.iter().enumerate().find(|(_, im)| im.width() < s || im.height() < s) {
        return Err(Error::Param(format!(
            "source {i} is {}x{}, smaller than patch size {s}",
            img.width(),
            img.height()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (lo, hi) = cfg.t_range;
    Ok((0..cfg.count)
        .map(|_| {
            let source = rng.random_range(0..sources.len());
            let img = &sources[source];
            let x = rng.random_range(0..=img.width() - s);
            let y = rng.random_range(0..=img.height() - s);
            let t = lo + rng.random::<f64>() * (hi - lo);
            PatchDraw { source, x, y, t }
        })
        .collect())
}

pub fn synthesize_patch_dataset(sources: &[Image], cfg: &SynthConfig) -> Result<Vec<PatchSample>> {
    let s = cfg.patch_size;
    draw_sequence(sources, cfg)?
        .into_iter()
        .map(|d| {
            let crop = sources[d.source].crop(Rect::new(d.x, d.y, s, s))?;
            Ok(PatchSample {
                patch: apply_haze(&crop, d.t, cfg.airlight)?,
                t_true: d.t,
            })
        })
        .collect()
}

/// Hazes a clear image with per-pixel `t = exp(−β·d)`.
pub fn synthesize_scene(image: &Image, depth: &DepthMap, beta: Beta, a: Airlight) -> Result<Image> {
    if image.dims() != depth.dims() {
        return Err(Error::Shape(format!("image {:?} vs depth {:?}", image.dims(), depth.dims())));
    }
    let t = transmission_from_depth_map(depth, beta).into_complete()?;
    apply_haze(image, &t, a)
}

/// Seeded haze-free texture: a colour gradient background overlaid with
/// checkerboard tiles of saturated colours. Every colour keeps at least one
/// channel low, so local dark channels are close to zero.
pub fn procedural_texture(width: usize, height: usize, seed: u64) -> Image {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let saturated = |rng: &mut ChaCha8Rng| {
        let mut c: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let dark = rng.random_range(0..3);
        c[dark] *= 0.15;
        c
    };
    let start = saturated(&mut rng);
    let end = saturated(&mut rng);
    let angle: f64 = rng.random::<f64>() * std::f64::consts::TAU;
    let (dx, dy) = (angle.cos(), angle.sin());
    let cell = rng.random_range(3..=10usize);
    let palette: Vec<[f64; 3]> = (0..6).map(|_| saturated(&mut rng)).collect();
    let offsets: Vec<usize> = (0..64).map(|_| rng.random_range(0..palette.len() + 2)).collect();
    let diag = ((width * width + height * height) as f64).sqrt().max(1.0);

    Image::from_fn(width, height, |x, y| {
        let (cx, cy) = (x / cell, y / cell);
        let pick = offsets[(cx * 7 + cy * 13) % offsets.len()];
        if (cx + cy) % 2 == 0 && pick < palette.len() {
            palette[pick]
        } else {
            let s = ((x as f64 * dx + y as f64 * dy) / diag + 1.0) / 2.0;
            [0, 1, 2].map(|c| start[c] * (1.0 - s) + end[c] * s)
        }
    })
}

/// `count` square procedural textures with consecutive seeds.
pub fn procedural_sources(count: usize, size: usize, seed: u64) -> Vec<Image> {
    (0..count as u64)
        .map(|i| procedural_texture(size, size, seed.wrapping_mul(1000).wrapping_add(i)))
        .collect()
}

pub const INDEX_FILE: &str = "index.csv";

/// Writes 16-bit PNG patches plus `index.csv` (`filename,t_true`).
pub fn export_dataset(samples: &[PatchSample], dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let index = dir.join(INDEX_FILE);
    let mut w = csv::Writer::from_path(&index).map_err(|e| csv_err(&index, e))?;
    w.write_record(["filename", "t_true"]).map_err(|e| csv_err(&index, e))?;
    for (i, s) in samples.iter().enumerate() {
        let name = format!("patch_{i:06}.png");
        write_image(&s.patch, dir.join(&name), BitDepth::Sixteen)?;
        w.write_record([name, format!("{:.6}", s.t_true)])
            .map_err(|e| csv_err(&index, e))?;
    }
    w.flush().map_err(|e| Error::io(&index, e))
}

pub fn import_dataset(dir: impl AsRef<Path>) -> Result<Vec<PatchSample>> {
    let dir = dir.as_ref();
    let index = dir.join(INDEX_FILE);
    let mut r = csv::Reader::from_path(&index).map_err(|e| csv_err(&index, e))?;
    let headers = r.headers().map_err(|e| csv_err(&index, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["filename", "t_true"] {
        return Err(Error::Parse {
            path: index,
            reason: format!("expected header `filename,t_true`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(&index, e))?;
        let t_true: f64 = rec[1].trim().parse().map_err(|_| Error::Parse {
            path: index.clone(),
            reason: format!("bad t_true `{}`", &rec[1]),
        })?;
        if !(0.0..=1.0).contains(&t_true) {
            return Err(Error::validation("t_true", format!("{t_true} outside [0,1]")));
        }
        out.push(PatchSample {
            patch: read_image(dir.join(&rec[0]))?,
            t_true,
        });
    }
    Ok(out)
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}
