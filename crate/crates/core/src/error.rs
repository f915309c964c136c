//! Error type shared by every module of the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside its mathematical domain (unit interval, sign constraints).
    #[error("domain error: {0}")]
    Domain(String),

    /// `gamma = 1` is the identity reference; the dichotomy function is
    /// identically zero there and has no normalization or unique maximum.
    #[error("gamma = 1 is degenerate: the dichotomy function vanishes identically")]
    DegenerateGamma,

    /// Derivative requested at a point where the power term blows up.
    #[error("derivative of order {order} singular at x = 0 for gamma = {gamma}")]
    SingularPoint { gamma: f64, order: u32 },

    /// Golden-section search exhausted its iteration budget.
    #[error("golden-section search did not converge within {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: u32, residual: f64 },

    /// Target value cannot be reached on the requested branch.
    #[error("target {value} exceeds the branch maximum {doc_max}")]
    BranchMismatch { value: f64, doc_max: f64 },

    /// Transform record does not belong to the image being inverted.
    #[error("record mismatch: {0}")]
    RecordMismatch(String),

    /// Grayscale conversion of an image that is already single-channel.
    #[error("image is already single-channel")]
    AlreadyGray,

    /// Operands disagree in width, height, channel count, or bit depth.
    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    /// Image cannot support the requested operation at its size.
    #[error("image {width}x{height} too small: {why}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        why: String,
    },

    #[error("codec error: {0}")]
    Codec(#[from] image::ImageError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("record parse error: {0}")]
    Record(#[from] serde_json::Error),
}
