//! Tone-dichotomy image processing.
//!
//! The central object is the transform `f_out = k * |f_in^g - f_in|`: the
//! normalized absolute residual between a gamma-corrected image and the
//! identity. Unlike plain gamma correction it is not monotone; it rises on
//! `[0, d_max]` and falls on `[d_max, 1]`, which maximizes contrast in both
//! dark and bright regions at once and stays exactly invertible given the
//! branch of each pixel.
//!
//! Modules:
//! - [`dichotomy`]: scalar analysis (maximum, slopes, areas, derivatives)
//!   and both inversion algorithms (golden-section and lookup table).
//! - [`image`]: normalized planar images, integer rasters, PNG/JPEG codecs.
//! - [`transform`]: whole-image enhancement, slope maps, exact round-trips.
//! - [`scalespace`]: Gaussian pyramid and the plain / gamma / dichotomy
//!   difference-of-Gaussians variants with extrema aggregation over gamma.
//! - [`metrics`]: patch entropy, PSNR, SSIM, and the paired-dataset
//!   gamma-sweep benchmark.
//! - [`synth`]: deterministic synthetic fixtures used by tests and demos.

pub mod dichotomy;
pub mod error;
pub mod image;
pub mod metrics;
pub mod scalespace;
pub mod synth;
pub mod transform;

pub use dichotomy::{
    build_lut, compute_d_max, dichotomy_derivative, dichotomy_eval, dichotomy_normalized,
    gamma_correct, invert_golden, invert_lut, numeric_slope, region_integrals, Branch,
    DichotomyLut, DichotomyParams, GoldenSearchConfig,
};
pub use error::{Error, Result};
pub use image::{dequantize, quantize, PlanarImage, Raster};
pub use transform::{classify_slopes, enhance, invert, render_class_map, SlopeClassMap, TransformRecord};
