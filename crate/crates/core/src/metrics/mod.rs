//! Evaluation protocol: region transmission, colour accuracy, edge visibility.

pub mod chroma;
pub mod edges;
pub mod region;

pub use chroma::{mean_chromaticity_distance, patch_chromaticity, rg_chromaticity, Chromaticity};
pub use edges::{e_index, r_index, sobel_magnitude, visible_edges, EdgeMetricConfig};
pub use region::{trimmed_mean, trimmed_mean_region, RegionMask};

/// Fraction trimmed from each end of a region before averaging.
pub const DEFAULT_TRIM: f64 = 0.15;
