pub mod bench;
pub mod dogspace;
pub mod enhance;
pub mod entropy;
pub mod invert;

use std::path::Path;

use anyhow::Context;

use crate::{CliError, CliResult};
use dichotome_core::PlanarImage;

/// Loads an image, mapping missing files to a runtime error carrying the path.
pub fn read_input(path: &Path) -> Result<PlanarImage, CliError> {
    dichotome_core::image::io::read_image(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Runtime)
}

/// Gamma validation shared by the transform commands: negative values and
/// the identity are usage errors, like any other malformed flag.
pub fn validate_gamma(gamma: f64) -> CliResult {
    if gamma.is_nan() || gamma < 0.0 {
        return Err(CliError::Usage(format!("--gamma {gamma} must be nonnegative")));
    }
    if gamma == 1.0 {
        return Err(CliError::Usage(
            "--gamma 1 is the identity; the dichotomy transform is undefined there".into(),
        ));
    }
    Ok(())
}
