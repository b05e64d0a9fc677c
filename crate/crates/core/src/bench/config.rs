use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dehaze::guided::GuidedConfig;
use crate::dehaze::{ClaheConfig, DcpConfig, VeilConfig};
use crate::error::{Error, Result};
use crate::koschmieder::DEFAULT_T_FLOOR;
use crate::metrics::{EdgeMetricConfig, DEFAULT_TRIM};
use crate::net::TrainConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dcp,
    Fast,
    Clahe,
    Mininet,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Dcp, Method::Fast, Method::Clahe, Method::Mininet];

    pub fn name(self) -> &'static str {
        match self {
            Method::Dcp => "dcp",
            Method::Fast => "fast",
            Method::Clahe => "clahe",
            Method::Mininet => "mininet",
        }
    }

    /// Whether the method produces a transmission estimate.
    pub fn estimates_transmission(self) -> bool {
        !matches!(self, Method::Clahe)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::validation("method", format!("unknown method `{s}` (dcp, fast, clahe, mininet)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MininetConfig {
    /// Trained parameter file; required when the method is selected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<PathBuf>,
    pub stride: usize,
    #[serde(with = "crate::dehaze::guided::optional")]
    pub refine: Option<GuidedConfig>,
    pub t_floor: f64,
}

impl Default for MininetConfig {
    fn default() -> Self {
        Self {
            params: None,
            stride: 4,
            refine: Some(GuidedConfig::default()),
            t_floor: DEFAULT_T_FLOOR,
        }
    }
}

/// Settings of the `synth` operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSettings {
    pub patch_size: usize,
    pub count: usize,
    pub t_min: f64,
    pub t_max: f64,
    pub airlight: [f64; 3],
}

impl Default for SynthSettings {
    fn default() -> Self {
        Self {
            patch_size: 16,
            count: 2000,
            t_min: 0.05,
            t_max: 1.0,
            airlight: [1.0; 3],
        }
    }
}

/// Everything a run needs besides the manifest. Loaded from TOML; unknown
/// keys are rejected and omitted keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    pub methods: Vec<Method>,
    /// Levels to evaluate; `None` means 5–9, restricted to those present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u8>>,
    /// Checker patch labels used for chromaticity distances and plots.
    pub chroma_patches: Vec<u8>,
    pub trim_fraction: f64,
    pub seed: u64,
    /// Record per-row wall time; off by default so reports are reproducible
    /// byte for byte.
    pub record_timing: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    pub dcp: DcpConfig,
    pub fast: VeilConfig,
    pub clahe: ClaheConfig,
    pub mininet: MininetConfig,
    pub edges: EdgeMetricConfig,
    pub synth: SynthSettings,
    pub train: TrainConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            manifest: None,
            methods: vec![Method::Dcp, Method::Fast, Method::Clahe],
            levels: None,
            chroma_patches: vec![2, 6, 7, 13, 14, 16, 17, 19],
            trim_fraction: DEFAULT_TRIM,
            seed: 0,
            record_timing: false,
            out_dir: None,
            dcp: DcpConfig::default(),
            fast: VeilConfig::default(),
            clahe: ClaheConfig::default(),
            mininet: MininetConfig::default(),
            edges: EdgeMetricConfig::default(),
            synth: SynthSettings::default(),
            train: TrainConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        let mut cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            reason: e.to_string(),
        })?;
        // paths inside the config are relative to the config file
        if let Some(base) = origin.parent() {
            for p in [&mut cfg.manifest, &mut cfg.mininet.params, &mut cfg.out_dir]
                .into_iter()
                .flatten()
            {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::validation("methods", "select at least one method"));
        }
        if let Some(levels) = &self.levels {
            if levels.is_empty() || levels.iter().any(|l| !(1..=9).contains(l)) {
                return Err(Error::validation("levels", "levels must be a non-empty subset of 1-9"));
            }
        }
        if self.chroma_patches.iter().any(|l| !(1..=24).contains(l)) {
            return Err(Error::validation("chroma_patches", "labels must be 1-24"));
        }
        if !(0.0..0.5).contains(&self.trim_fraction) {
            return Err(Error::validation("trim_fraction", "must lie in [0, 0.5)"));
        }
        self.dcp.validate()?;
        self.fast.validate()?;
        self.clahe.validate()?;
        self.edges.validate()?;
        self.train.validate()?;
        if self.mininet.stride < 1 {
            return Err(Error::validation("mininet.stride", "must be >= 1"));
        }
        if !(self.mininet.t_floor > 0.0 && self.mininet.t_floor <= 1.0) {
            return Err(Error::validation("mininet.t_floor", "must lie in (0,1]"));
        }
        Ok(())
    }
}
