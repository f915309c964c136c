use std::path::{Path, PathBuf};

use anyhow::Context;

use dichotome_core::transform::{enhance, render_class_map};

use crate::output::{write_atomic, write_image_atomic};
use crate::{CliError, CliResult};

use super::{read_input, validate_gamma};

fn is_jpeg(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("jpg") | Some("jpeg")
    )
}

pub fn run(
    input: &Path,
    output: &Path,
    gamma: f64,
    save_record: Option<PathBuf>,
    save_classmap: Option<PathBuf>,
    depth: Option<u8>,
) -> CliResult {
    validate_gamma(gamma)?;
    let depth = match depth {
        Some(8) => 8,
        Some(16) => {
            if is_jpeg(output) {
                return Err(CliError::Usage("JPEG output is 8-bit only".into()));
            }
            16
        }
        Some(other) => {
            return Err(CliError::Usage(format!("--depth {other} must be 8 or 16")));
        }
        // 16-bit PNG by default so inversion from the file stays exact
        None if is_jpeg(output) => 8,
        None => 16,
    };

    let image = read_input(input)?;
    let (enhanced, record) = enhance(&image, gamma).map_err(|e| CliError::Runtime(e.into()))?;

    write_image_atomic(output, &enhanced, depth)?;

    if let Some(path) = save_record {
        let json = record
            .to_json()
            .context("serializing the transform record")
            .map_err(CliError::Runtime)?;
        write_atomic(&path, json.as_bytes())?;
    }
    if let Some(path) = save_classmap {
        write_image_atomic(&path, &render_class_map(&record.class_map), 8)?;
    }

    let params = &record.params;
    println!(
        "enhanced {} -> {} (gamma {}, d_max {:.6}, k {:.6})",
        input.display(),
        output.display(),
        gamma,
        params.d_max,
        params.k
    );
    Ok(())
}
