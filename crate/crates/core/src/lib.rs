//! Population density under two models and its rank correlation with a
//! disease case rate.
//!
//! The *old model* divides a region's population by its administrative area.
//! The *new model* divides it by the settlement area measured on a settlement
//! raster clipped to the region's boundary. The crate covers the whole chain:
//!
//! 1. [`geometry`]: GeoJSON boundaries rasterized into bit masks.
//! 2. [`raster`]: ESRI ASCII settlement grids, binarization and overlay counts.
//! 3. [`density`]: pixel-size calibration with Tukey fences and both densities.
//! 4. [`stats`]: ranks, Spearman's rho, Shapiro-Wilk, paired t-test, Hotelling's
//!    t for dependent overlapping correlations, and the strength scale.
//! 5. [`pipeline`]: config-driven runs, CSV/text reports and SVG plots.

pub mod density;
pub mod error;
pub mod geometry;
pub mod pipeline;
pub mod raster;
pub mod stats;

pub use error::{Error, Result};
