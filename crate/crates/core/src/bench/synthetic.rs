//! A synthetic two-plane scene with colour checkers and exactly known haze,
//! for exercising the benchmark end to end without external data.
//!
//! The upper half of the frame is a back wall at 7 m, the lower half a table
//! top at 4.35 m; each carries a 6×4 colour checker. Three haze levels are
//! rendered with the Koschmieder model.

use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::manifest::{CheckerEntry, LevelEntry, PatchRoi, SceneManifest};
use crate::error::{Error, Result};
use crate::io::{write_image, BitDepth};
use crate::raster::{Airlight, Beta, DepthMap, Image, Rect};
use crate::synth::{procedural_texture, synthesize_scene};

pub const BACK_DISTANCE_M: f64 = 7.0;
pub const TABLE_DISTANCE_M: f64 = 4.35;
/// `(level, β in 10⁻³ m⁻¹)`.
pub const LEVELS: [(u8, f64); 3] = [(5, 103.69), (7, 83.57), (9, 17.84)];
pub const MANIFEST_FILE: &str = "scene.toml";

/// Approximate sRGB values of the 24-patch colour checker, row-major.
pub const CHECKER_SRGB: [[u8; 3]; 24] = [
    [115, 82, 68],
    [194, 150, 130],
    [98, 122, 157],
    [87, 108, 67],
    [133, 128, 177],
    [103, 189, 170],
    [214, 126, 44],
    [80, 91, 166],
    [193, 90, 99],
    [94, 60, 108],
    [157, 188, 64],
    [224, 163, 46],
    [56, 61, 150],
    [70, 148, 73],
    [175, 54, 60],
    [231, 199, 31],
    [187, 86, 149],
    [8, 133, 161],
    [243, 243, 242],
    [200, 200, 200],
    [160, 160, 160],
    [122, 122, 121],
    [85, 85, 85],
    [52, 52, 52],
];

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPlaneScene {
    pub width: usize,
    pub height: usize,
    /// Checker cell size in pixels; patch ROIs are the cell interiors.
    pub cell: usize,
    pub airlight: Airlight,
    pub seed: u64,
}

impl Default for TwoPlaneScene {
    fn default() -> Self {
        Self {
            width: 128,
            height: 112,
            cell: 8,
            airlight: Airlight::gray(0.95).expect("valid airlight"),
            seed: 0,
        }
    }
}

impl TwoPlaneScene {
    fn checker_origins(&self) -> [(&'static str, f64, usize, usize); 2] {
        let half = self.height / 2;
        let y_off = (half - 4 * self.cell) / 2;
        [
            ("back", BACK_DISTANCE_M, self.cell, y_off),
            ("table", TABLE_DISTANCE_M, self.cell, half + y_off),
        ]
    }

    fn validate(&self) -> Result<()> {
        if self.cell < 3 {
            return Err(Error::Param("checker cell must be >= 3 px".into()));
        }
        if self.width < 8 * self.cell || self.height < 10 * self.cell {
            return Err(Error::Param(format!(
                "{}x{} frame too small for {} px checker cells",
                self.width, self.height, self.cell
            )));
        }
        Ok(())
    }

    pub fn hazefree(&self) -> Result<Image> {
        self.validate()?;
        let mut img = procedural_texture(self.width, self.height, self.seed);
        for (_, _, ox, oy) in self.checker_origins() {
            for (i, rgb) in CHECKER_SRGB.iter().enumerate() {
                let (cx, cy) = (ox + (i % 6) * self.cell, oy + (i / 6) * self.cell);
                let c = rgb.map(|v| v as f64 / 255.0);
                for y in cy..cy + self.cell {
                    for x in cx..cx + self.cell {
                        img.set_pixel(x, y, c);
                    }
                }
            }
        }
        Ok(img)
    }

    pub fn depth(&self) -> Result<DepthMap> {
        let half = self.height / 2;
        DepthMap::from_fn(self.width, self.height, |_, y| {
            Some(if y < half { BACK_DISTANCE_M } else { TABLE_DISTANCE_M })
        })
    }

    /// Manifest with paths relative to the output directory.
    pub fn manifest(&self, base_dir: &Path) -> SceneManifest {
        let c = self.cell;
        let checkers = self
            .checker_origins()
            .into_iter()
            .map(|(name, d, ox, oy)| CheckerEntry {
                name: name.to_string(),
                distance_m: d,
                roi: Rect::new(ox, oy, 6 * c, 4 * c),
                patch_rois: (0..24)
                    .map(|i| PatchRoi {
                        label: i as u8 + 1,
                        x: ox + (i % 6) * c + 1,
                        y: oy + (i / 6) * c + 1,
                        width: c - 2,
                        height: c - 2,
                    })
                    .collect(),
            })
            .collect();
        SceneManifest {
            scene_name: "synthetic-two-plane".into(),
            hazefree_path: "hazefree.png".into(),
            crop: None,
            levels: LEVELS
                .iter()
                .map(|&(level, beta_e3)| LevelEntry {
                    level,
                    path: format!("level{level}.png").into(),
                    beta_e3,
                    airlight: self.airlight.rgb(),
                })
                .collect(),
            checkers,
            base_dir: base_dir.to_path_buf(),
        }
    }

    /// Renders all images as 16-bit PNGs into `dir` and writes the manifest;
    /// returns the manifest path.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let clear = self.hazefree()?;
        let depth = self.depth()?;
        let manifest = self.manifest(dir);
        write_image(&clear, dir.join(&manifest.hazefree_path), BitDepth::Sixteen)?;
        for level in &manifest.levels {
            let hazy = synthesize_scene(&clear, &depth, Beta::from_e3(level.beta_e3)?, self.airlight)?;
            write_image(&hazy, dir.join(&level.path), BitDepth::Sixteen)?;
        }
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, manifest.to_toml()).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
