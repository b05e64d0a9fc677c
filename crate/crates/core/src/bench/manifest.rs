//! Scene manifests (TOML).
//!
//! ```toml
//! scene_name = "two-plane"
//! hazefree_path = "hazefree.png"      # relative to the manifest file
//! crop = { x = 0, y = 0, width = 96, height = 64 }   # optional
//!
//! [[levels]]
//! level = 9
//! path = "level9.png"
//! beta_e3 = 17.84                   # β in 10⁻³ m⁻¹
//! airlight = [0.92, 0.92, 0.92]
//!
//! [[checkers]]
//! name = "back"
//! distance_m = 7.0
//! roi = { x = 4, y = 4, width = 36, height = 24 }
//! patch_rois = [ { label = 1, x = 4, y = 4, width = 6, height = 6 } ]   # optional
//! ```
//!
//! Every rectangle is expressed in cropped-image coordinates. Unknown keys
//! are rejected.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::image_dimensions;
use crate::raster::{Airlight, Beta, Rect};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneManifest {
    pub scene_name: String,
    pub hazefree_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crop: Option<Rect>,
    pub levels: Vec<LevelEntry>,
    pub checkers: Vec<CheckerEntry>,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelEntry {
    pub level: u8,
    pub path: PathBuf,
    pub beta_e3: f64,
    pub airlight: [f64; 3],
}

impl LevelEntry {
    /// β in m⁻¹.
    pub fn beta(&self) -> Result<Beta> {
        Beta::from_e3(self.beta_e3)
    }

    pub fn airlight(&self) -> Result<Airlight> {
        Airlight::new(self.airlight)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckerEntry {
    pub name: String,
    pub distance_m: f64,
    pub roi: Rect,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub patch_rois: Vec<PatchRoi>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatchRoi {
    /// Colour-checker patch number, 1–24.
    pub label: u8,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl PatchRoi {
    pub fn rect(&self) -> Rect {
        Rect::new(self.x, self.y, self.width, self.height)
    }
}

impl CheckerEntry {
    pub fn patch(&self, label: u8) -> Option<&PatchRoi> {
        self.patch_rois.iter().find(|p| p.label == label)
    }
}

impl SceneManifest {
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn level(&self, level: u8) -> Option<&LevelEntry> {
        self.levels.iter().find(|l| l.level == level)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is always serializable")
    }

    /// Checks every invariant that needs no pixel data. `frame` is the
    /// (cropped) image size ROIs must fit in.
    pub fn validate(&self, frame: (usize, usize)) -> Result<()> {
        if self.scene_name.trim().is_empty() {
            return Err(Error::validation("scene_name", "must not be empty"));
        }
        if self.levels.is_empty() {
            return Err(Error::validation("levels", "at least one level is required"));
        }
        let mut seen = BTreeSet::new();
        for l in &self.levels {
            let field = |f: &str| format!("levels[{}].{f}", l.level);
            if !(1..=9).contains(&l.level) {
                return Err(Error::validation(field("level"), "must be 1-9"));
            }
            if !seen.insert(l.level) {
                return Err(Error::validation(field("level"), "duplicate level"));
            }
            if !(l.beta_e3.is_finite() && l.beta_e3 > 0.0) {
                return Err(Error::validation(field("beta_e3"), format!("{} must be > 0", l.beta_e3)));
            }
            if l.airlight().is_err() {
                return Err(Error::validation(
                    field("airlight"),
                    format!("{:?} must have components in (0,1]", l.airlight),
                ));
            }
        }
        if self.checkers.is_empty() {
            return Err(Error::validation("checkers", "at least one checker is required"));
        }
        let mut names = BTreeSet::new();
        let (fw, fh) = frame;
        let inside = |r: &Rect| !r.is_empty() && r.fits_within(fw, fh);
        for c in &self.checkers {
            let field = |f: &str| format!("checkers[{}].{f}", c.name);
            if !names.insert(c.name.as_str()) {
                return Err(Error::validation(field("name"), "duplicate checker name"));
            }
            if !(c.distance_m.is_finite() && c.distance_m > 0.0) {
                return Err(Error::validation(field("distance_m"), format!("{} must be > 0", c.distance_m)));
            }
            if !inside(&c.roi) {
                return Err(Error::validation(
                    field("roi"),
                    format!("{:?} outside the {fw}x{fh} image", c.roi),
                ));
            }
            let mut labels = BTreeSet::new();
            for p in &c.patch_rois {
                let pf = field(&format!("patch_rois[{}]", p.label));
                if !(1..=24).contains(&p.label) {
                    return Err(Error::validation(pf, "label must be 1-24"));
                }
                if !labels.insert(p.label) {
                    return Err(Error::validation(pf, "duplicate label"));
                }
                if !inside(&p.rect()) {
                    return Err(Error::validation(pf, format!("{:?} outside the {fw}x{fh} image", p.rect())));
                }
            }
        }
        Ok(())
    }
}

/// Parses manifest text; `base_dir` anchors relative paths. Does not touch
/// the filesystem.
pub fn parse_manifest(text: &str, origin: &Path, base_dir: &Path) -> Result<SceneManifest> {
    let mut m: SceneManifest = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        reason: e.to_string(),
    })?;
    m.base_dir = base_dir.to_path_buf();
    Ok(m)
}

/// Reads, parses and validates a manifest. ROIs are checked against the crop
/// when given, otherwise against the haze-free image dimensions.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<SceneManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let m = parse_manifest(&text, path, &base)?;

    let hazefree = m.resolve(&m.hazefree_path);
    let (w, h) = image_dimensions(&hazefree).map_err(|e| match e {
        Error::Io { .. } => Error::validation("hazefree_path", format!("cannot read {}: {e}", hazefree.display())),
        other => other,
    })?;
    let frame = match m.crop {
        Some(c) => {
            if c.is_empty() || !c.fits_within(w, h) {
                return Err(Error::validation("crop", format!("{c:?} outside the {w}x{h} haze-free image")));
            }
            (c.width, c.height)
        }
        None => (w, h),
    };
    m.validate(frame)?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
scene_name = "mini"
hazefree_path = "clear.png"

[[levels]]
level = 5
path = "l5.png"
beta_e3 = 103.69
airlight = [0.9, 0.9, 0.9]

[[checkers]]
name = "back"
distance_m = 7.0
roi = { x = 1, y = 1, width = 4, height = 4 }
"#;

    fn parsed(text: &str) -> SceneManifest {
        parse_manifest(text, Path::new("m.toml"), Path::new("/data")).unwrap()
    }

    #[test]
    fn minimal_round_trips() {
        let m = parsed(MINIMAL);
        m.validate((10, 10)).unwrap();
        let again = parsed(&m.to_toml());
        assert_eq!(m, again);
        assert_eq!(m.resolve(&m.hazefree_path), PathBuf::from("/data/clear.png"));
    }

    #[test]
    fn beta_is_converted_to_per_meter() {
        let m = parsed(MINIMAL);
        assert!((m.levels[0].beta().unwrap().per_meter() - 0.10369).abs() < 1e-15);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let m = parsed(MINIMAL);
        match m.validate((4, 4)) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "checkers[back].roi"),
            other => panic!("{other:?}"),
        }
        let bad_beta = parsed(&MINIMAL.replace("103.69", "-1.0"));
        match bad_beta.validate((10, 10)) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "levels[5].beta_e3"),
            other => panic!("{other:?}"),
        }
        let dup = format!("{MINIMAL}\n[[levels]]\nlevel = 5\npath = \"x.png\"\nbeta_e3 = 1.0\nairlight = [1.0, 1.0, 1.0]\n");
        assert!(matches!(parsed(&dup).validate((10, 10)), Err(Error::Validation { .. })));
    }

    #[test]
    fn unknown_keys_are_errors() {
        let typo = MINIMAL.replace("distance_m", "distanse_m");
        assert!(matches!(
            parse_manifest(&typo, Path::new("m.toml"), Path::new(".")),
            Err(Error::Parse { .. })
        ));
    }

    proptest::proptest! {
        #[test]
        fn arbitrary_manifests_round_trip(
            name in "[a-z][a-z0-9 _-]{0,12}",
            levels in proptest::collection::btree_set(1u8..=9, 1..5),
            beta in 0.01f64..500.0,
            air in 0.05f64..=1.0,
            dist in 0.1f64..100.0,
            (x, y, w, h) in (0usize..50, 0usize..50, 1usize..50, 1usize..50),
            crop in proptest::bool::ANY,
            patches in proptest::collection::btree_set(1u8..=24, 0..6),
        ) {
            let m = SceneManifest {
                scene_name: name,
                hazefree_path: "clear.png".into(),
                crop: crop.then(|| Rect::new(1, 2, 100, 100)),
                levels: levels.iter().map(|&l| LevelEntry {
                    level: l,
                    path: format!("l{l}.png").into(),
                    beta_e3: beta * l as f64,
                    airlight: [air, air * 0.9, 1.0],
                }).collect(),
                checkers: vec![CheckerEntry {
                    name: "c".into(),
                    distance_m: dist,
                    roi: Rect::new(x, y, w, h),
                    patch_rois: patches.iter().map(|&label| PatchRoi { label, x, y, width: 1, height: 1 }).collect(),
                }],
                base_dir: PathBuf::from("/d"),
            };
            let again = parse_manifest(&m.to_toml(), Path::new("m.toml"), Path::new("/d")).unwrap();
            proptest::prop_assert_eq!(&m, &again);
            proptest::prop_assert!(m.validate((100, 100)).is_ok());
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_manifest("/nonexistent/scene.toml"), Err(Error::Io { .. })));
    }
}
