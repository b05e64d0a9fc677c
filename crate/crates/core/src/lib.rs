//! Dehazing toolkit and benchmark harness built around the Koschmieder
//! imaging model `J = I·t + A∞(1 − t)`, `t = exp(−β·d)`.
//!
//! - [`koschmieder`]: haze rendering, inversion and depth/transmission conversion
//! - [`dehaze`]: dark channel prior, atmospheric veil and CLAHE restoration
//! - [`synth`]: seeded synthetic hazy patches and scenes
//! - [`net`]: a small trainable CNN transmission regressor
//! - [`metrics`]: trimmed region means, rg chromaticity, visible-edge indices
//! - [`bench`]: scene manifests, the method × level benchmark and its reports
//!
//! Runnable walkthroughs live in `examples/`; the `hazebench` binary exposes
//! the same operations on the command line.

// `!(x > 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cli;
pub mod dehaze;
pub mod error;
pub mod io;
pub mod koschmieder;
pub mod metrics;
pub mod net;
pub mod raster;
pub mod synth;

pub use error::{Error, Result};
pub use raster::{Airlight, Beta, DepthMap, Image, Plane, Rect, Transmission, TransmissionMap};
