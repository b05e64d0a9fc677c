//! Raster carriers shared by every stage of the pipeline.
//!
//! All samples are `f64`. Colour images are interleaved RGB, row-major.

use crate::error::{Error, Result};

/// BT.601 luma weights, used for every grayscale conversion in the crate.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

pub fn luma(rgb: [f64; 3]) -> f64 {
    LUMA_WEIGHTS[0] * rgb[0] + LUMA_WEIGHTS[1] * rgb[1] + LUMA_WEIGHTS[2] * rgb[2]
}

/// Axis-aligned pixel rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn new(x: usize, y: usize, width: usize, height: usize) -> Self {
        Self {
            x,
            y,
            width,
            height,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.width == 0 || self.height == 0
    }

    pub fn fits_within(&self, width: usize, height: usize) -> bool {
        self.x + self.width <= width && self.y + self.height <= height
    }
}

/// H×W×3 image with samples in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height * 3 {
            return Err(Error::Shape(format!(
                "image {width}x{height} needs {} samples, got {}",
                width * height * 3,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::Domain(format!("image sample {bad} outside [0,1]")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Self {
        let rgb = rgb.map(|v| v.clamp(0.0, 1.0));
        let data = (0..width * height).flat_map(|_| rgb).collect();
        Self {
            width,
            height,
            data,
        }
    }

    /// Builds an image from a per-pixel generator; results are clamped to [0, 1].
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y).map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) }));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    /// Gray image where all three channels equal the plane (clamped).
    pub fn from_gray(plane: &Plane) -> Self {
        Self::from_fn(plane.width(), plane.height(), |x, y| {
            let v = plane.get(x, y);
            [v, v, v]
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn pixels(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    /// Sets a pixel, clamping each component to [0, 1].
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f64; 3]) {
        let i = (y * self.width + x) * 3;
        for (c, v) in rgb.into_iter().enumerate() {
            self.data[i + c] = v.clamp(0.0, 1.0);
        }
    }

    pub fn channel(&self, c: usize) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().skip(c).step_by(3).copied().collect(),
        }
    }

    pub fn luminance(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.pixels().map(luma).collect(),
        }
    }

    pub fn min_channel(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.pixels().map(|p| p[0].min(p[1]).min(p[2])).collect(),
        }
    }

    pub fn crop(&self, rect: Rect) -> Result<Image> {
        if rect.is_empty() || !rect.fits_within(self.width, self.height) {
            return Err(Error::Shape(format!(
                "crop {rect:?} does not fit image {}x{}",
                self.width, self.height
            )));
        }
        let mut data = Vec::with_capacity(rect.width * rect.height * 3);
        for y in rect.y..rect.y + rect.height {
            let start = (y * self.width + rect.x) * 3;
            data.extend_from_slice(&self.data[start..start + rect.width * 3]);
        }
        Ok(Image {
            width: rect.width,
            height: rect.height,
            data,
        })
    }

    /// Standard sRGB decode of stored values to linear light.
    pub fn linearize_srgb(&self) -> Image {
        Image {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| srgb_to_linear(v)).collect(),
        }
    }

    pub fn mean_abs_diff(&self, other: &Image) -> Result<f64> {
        if self.dims() != other.dims() {
            return Err(Error::Shape(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        let sum: f64 = self.data.iter().zip(&other.data).map(|(a, b)| (a - b).abs()).sum();
        Ok(sum / self.data.len().max(1) as f64)
    }
}

pub fn srgb_to_linear(v: f64) -> f64 {
    if v <= 0.04045 {
        v / 12.92
    } else {
        ((v + 0.055) / 1.055).powf(2.4)
    }
}

/// Single-channel real-valued map. No range restriction.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Shape(format!(
                "plane {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.data[y * self.width + x] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Result<Plane> {
        ensure_same_dims(self.dims(), other.dims())?;
        Ok(Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn clamp(&self, lo: f64, hi: f64) -> Plane {
        self.map(|v| v.clamp(lo, hi))
    }
}

pub(crate) fn ensure_same_dims(a: (usize, usize), b: (usize, usize)) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!("{}x{} vs {}x{}", a.0, a.1, b.0, b.1)));
    }
    Ok(())
}

/// Per-pixel transmission t(x) in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionMap(Plane);

impl TransmissionMap {
    /// Wraps a plane, rejecting samples outside [0, 1].
    pub fn new(plane: Plane) -> Result<Self> {
        if let Some(bad) = plane.data().iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
            return Err(Error::Domain(format!("transmission {bad} outside [0,1]")));
        }
        Ok(Self(plane))
    }

    pub fn clamped(plane: &Plane) -> Self {
        Self(plane.map(|v| if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) }))
    }

    pub fn uniform(width: usize, height: usize, t: f64) -> Self {
        Self(Plane::filled(width, height, t.clamp(0.0, 1.0)))
    }

    pub fn as_plane(&self) -> &Plane {
        &self.0
    }

    pub fn into_plane(self) -> Plane {
        self.0
    }

    pub fn dims(&self) -> (usize, usize) {
        self.0.dims()
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.0.get(x, y)
    }
}

/// Transmission argument of the imaging model: a single value or a map.
#[derive(Debug, Clone, Copy)]
pub enum Transmission<'a> {
    Uniform(f64),
    Map(&'a TransmissionMap),
}

impl From<f64> for Transmission<'_> {
    fn from(t: f64) -> Self {
        Transmission::Uniform(t)
    }
}

impl<'a> From<&'a TransmissionMap> for Transmission<'a> {
    fn from(t: &'a TransmissionMap) -> Self {
        Transmission::Map(t)
    }
}

impl Transmission<'_> {
    pub(crate) fn check(&self, dims: (usize, usize)) -> Result<()> {
        match self {
            Transmission::Uniform(t) if !t.is_finite() || *t < 0.0 || *t > 1.0 => {
                Err(Error::Domain(format!("transmission {t} outside [0,1]")))
            }
            Transmission::Uniform(_) => Ok(()),
            Transmission::Map(m) => ensure_same_dims(dims, m.dims()),
        }
    }

    #[inline]
    pub(crate) fn at(&self, index: usize) -> f64 {
        match self {
            Transmission::Uniform(t) => *t,
            Transmission::Map(m) => m.as_plane().data()[index],
        }
    }
}

/// Global atmospheric light A∞, each component in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Airlight([f64; 3]);

impl Airlight {
    pub fn new(rgb: [f64; 3]) -> Result<Self> {
        if rgb.iter().any(|v| !v.is_finite() || *v <= 0.0 || *v > 1.0) {
            return Err(Error::Param(format!("airlight {rgb:?} must lie in (0,1]")));
        }
        Ok(Self(rgb))
    }

    pub fn gray(v: f64) -> Result<Self> {
        Self::new([v; 3])
    }

    pub fn white() -> Self {
        Self([1.0; 3])
    }

    pub fn rgb(&self) -> [f64; 3] {
        self.0
    }

    /// Channel mean.
    pub fn mean(&self) -> f64 {
        (self.0[0] + self.0[1] + self.0[2]) / 3.0
    }
}

/// Scattering coefficient β in m⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Beta(f64);

impl Beta {
    pub fn new(per_meter: f64) -> Result<Self> {
        if !per_meter.is_finite() || per_meter <= 0.0 {
            return Err(Error::Param(format!("beta {per_meter} must be finite and > 0")));
        }
        Ok(Self(per_meter))
    }

    /// From the table convention of 10⁻³ m⁻¹ (e.g. `103.69` → 0.10369 m⁻¹).
    pub fn from_e3(value: f64) -> Result<Self> {
        Self::new(value / 1000.0)
    }

    pub fn per_meter(&self) -> f64 {
        self.0
    }
}

/// Distances in meters; `None` marks an unknown sample.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    data: Vec<Option<f64>>,
}

impl DepthMap {
    pub fn new(width: usize, height: usize, data: Vec<Option<f64>>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Shape(format!(
                "depth map {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().flatten().find(|d| !d.is_finite() || **d < 0.0) {
            return Err(Error::Domain(format!("depth {bad} must be finite and >= 0")));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Option<f64>) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn data(&self) -> &[Option<f64>] {
        &self.data
    }
}

/// Transmission derived from a depth map; unknown depths stay unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialTransmission {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Option<f64>>,
}

impl PartialTransmission {
    /// Fails with a domain error if any sample is unknown.
    pub fn into_complete(self) -> Result<TransmissionMap> {
        let data = self
            .data
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::Domain(format!("unknown depth at pixel index {i}"))))
            .collect::<Result<Vec<_>>>()?;
        TransmissionMap::new(Plane::new(self.width, self.height, data)?)
    }
}
