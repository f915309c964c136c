use std::fmt::Write as _;
use std::path::Path;

use dichotome_core::metrics::{entropy_histogram, patch_entropy};
use dichotome_core::{quantize, PlanarImage};

use crate::output::{heat_color, write_atomic, write_image_atomic};
use crate::{CliError, CliResult};

use super::read_input;

fn parse_mesh(spec: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = spec.split(['x', 'X']).collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("--mesh {spec:?} must be ROWSxCOLS")));
    }
    let rows = parts[0].trim().parse::<usize>();
    let cols = parts[1].trim().parse::<usize>();
    match (rows, cols) {
        (Ok(r), Ok(c)) if r >= 1 && c >= 1 => Ok((r, c)),
        _ => Err(CliError::Usage(format!("--mesh {spec:?} must be ROWSxCOLS"))),
    }
}

pub fn run(input: &Path, out: &Path, mesh: &str, bins: usize) -> CliResult {
    let (rows, cols) = parse_mesh(mesh)?;
    if bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let image = read_input(input)?;
    let gray = if image.channels() == 3 {
        image.to_grayscale().map_err(|e| CliError::Runtime(e.into()))?
    } else {
        image
    };
    let raster = quantize(&gray, 8);
    let grid = patch_entropy(&raster, rows, cols).map_err(|e| CliError::Runtime(e.into()))?;

    // grid CSV, one mesh row per line
    let mut csv = String::new();
    for r in 0..grid.rows {
        let row: Vec<String> = (0..grid.cols)
            .map(|c| format!("{:.6}", grid.values[r * grid.cols + c]))
            .collect();
        let _ = writeln!(csv, "{}", row.join(","));
    }
    write_atomic(&out.join("entropy.csv"), csv.as_bytes())?;

    // histogram CSV over [0, 8] bits
    let counts = entropy_histogram(&grid, bins);
    let width = 8.0 / bins as f64;
    let mut hist = String::from("bin_start,bin_end,count\n");
    for (i, count) in counts.iter().enumerate() {
        let _ = writeln!(
            hist,
            "{:.4},{:.4},{count}",
            width * i as f64,
            width * (i + 1) as f64
        );
    }
    write_atomic(&out.join("entropy_hist.csv"), hist.as_bytes())?;

    // heatmap: one pixel per patch, colormapped over the full 8-bit range
    let heat = PlanarImage::from_fn(grid.cols, grid.rows, 3, |x, y, c| {
        heat_color(grid.values[y * grid.cols + x] / 8.0)[c]
    })
    .expect("heatmap geometry");
    write_image_atomic(&out.join("entropy_heatmap.png"), &heat, 8)?;

    println!(
        "entropy: {}x{} mesh on {} (mean {:.4} bits) -> {}",
        rows,
        cols,
        input.display(),
        grid.mean(),
        out.display()
    );
    Ok(())
}
