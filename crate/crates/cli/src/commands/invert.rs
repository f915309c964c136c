use std::path::Path;

use anyhow::Context;

use dichotome_core::dichotomy::dichotomy_normalized;
use dichotome_core::transform::{invert, TransformRecord};
use dichotome_core::{quantize, Error};

use crate::output::write_image_atomic;
use crate::{CliError, CliResult};

use super::read_input;

pub fn run(enhanced_path: &Path, record_path: &Path, output: &Path) -> CliResult {
    let enhanced = read_input(enhanced_path)?;
    let json = std::fs::read_to_string(record_path)
        .with_context(|| format!("reading {}", record_path.display()))
        .map_err(CliError::Runtime)?;
    let record = TransformRecord::from_json(&json)
        .with_context(|| format!("parsing {}", record_path.display()))
        .map_err(CliError::Runtime)?;

    let restored = invert(&enhanced, &record).map_err(|e| match e {
        err @ Error::RecordMismatch(_) => CliError::Runtime(
            anyhow::Error::new(err).context(format!(
                "record {} does not belong to {}",
                record_path.display(),
                enhanced_path.display()
            )),
        ),
        err => CliError::Runtime(err.into()),
    })?;

    write_image_atomic(output, &restored, record.source_bit_depth)?;

    // Round-trip residual: re-apply the forward transform to the
    // reconstruction and compare with what the enhanced file stores. On the
    // lookup-table path the comparison happens on integer levels at the
    // enhanced file's depth, where an exact round trip reports 0.
    let used_lut = record
        .lut
        .as_ref()
        .is_some_and(|lut| lut.bit_max == (1u32 << record.source_bit_depth) - 1);
    if used_lut {
        let forward: Vec<f64> = restored
            .data()
            .iter()
            .map(|&x| dichotomy_normalized(x, &record.params).expect("restored samples in range"))
            .collect();
        let forward_img = dichotome_core::PlanarImage::new(
            restored.width(),
            restored.height(),
            restored.channels(),
            forward,
            enhanced.source_bit_depth,
        )
        .expect("forward image is valid");
        let depth = enhanced.source_bit_depth;
        let a = quantize(&forward_img, depth);
        let b = quantize(&enhanced, depth);
        let max_err = a
            .data
            .iter()
            .zip(&b.data)
            .map(|(&x, &y)| (i32::from(x) - i32::from(y)).unsigned_abs())
            .max()
            .unwrap_or(0);
        println!(
            "inverted {} -> {} (max per-sample error: {max_err} levels at {depth}-bit)",
            enhanced_path.display(),
            output.display()
        );
    } else {
        let max_err = restored
            .data()
            .iter()
            .zip(enhanced.data())
            .map(|(&x, &v)| {
                let fwd = dichotomy_normalized(x, &record.params).expect("restored samples in range");
                (fwd - v).abs()
            })
            .fold(0.0f64, f64::max);
        println!(
            "inverted {} -> {} (max per-sample error: {max_err:.3e})",
            enhanced_path.display(),
            output.display()
        );
    }
    Ok(())
}
