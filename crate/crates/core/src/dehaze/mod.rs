//! Classical single-image restoration methods.

pub mod clahe;
pub mod dcp;
pub mod filters;
pub mod guided;
pub mod veil;

pub use clahe::{clahe_dehaze, clahe_plane, ClaheConfig};
pub use dcp::{dark_channel, dcp_dehaze, dcp_transmission, estimate_airlight, DcpConfig};
pub use guided::{guided_filter, GuidedConfig};
pub use veil::{atmospheric_veil, veil_dehaze, veil_transmission, VeilConfig};
