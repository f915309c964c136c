use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use dichotome_core::scalespace::{
    aggregate_over_gamma, build_stack, compose_gamma_overlay, AggregateMode, DogVariant,
    ScaleSpaceConfig,
};
use dichotome_core::Error;

use crate::config::{load, parse_gamma_list};
use crate::output::{gamma_label, mask_to_image, response_to_image, write_atomic, write_image_atomic};
use crate::{CliError, CliResult, Variant};

use super::read_input;

#[derive(Serialize)]
struct CellEntry {
    level: usize,
    sigma2: f64,
    gamma: f64,
    t: f64,
    delta_t: f64,
    width: usize,
    height: usize,
    response: String,
    response_min: f64,
    response_max: f64,
    response_sha256: String,
    mask: String,
    mask_sha256: String,
    positive_extrema: usize,
    negative_extrema: usize,
}

#[derive(Serialize)]
struct AggregateEntry {
    level: usize,
    mode: String,
    file: String,
    min: f64,
    max: f64,
    sha256: String,
}

#[derive(Serialize)]
struct OverlayEntry {
    level: usize,
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    version: u32,
    variant: String,
    input: String,
    config: ScaleSpaceConfig,
    cells: Vec<CellEntry>,
    aggregates: Vec<AggregateEntry>,
    overlays: Vec<OverlayEntry>,
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &Path,
    out: &Path,
    config_path: Option<PathBuf>,
    variant: Variant,
    gammas: Option<String>,
    thr_plus: Option<f64>,
    thr_minus: Option<f64>,
) -> CliResult {
    let mut cfg = match config_path {
        Some(path) => load(&path).map_err(|e| CliError::Usage(format!("{e:#}")))?,
        None => ScaleSpaceConfig::default(),
    };
    if let Some(spec) = gammas {
        cfg.gamma_set = parse_gamma_list(&spec).map_err(|e| CliError::Usage(format!("{e:#}")))?;
        if cfg.palette.len() < cfg.gamma_set.len() {
            use dichotome_core::scalespace::DEFAULT_PALETTE;
            cfg.palette = (0..cfg.gamma_set.len())
                .map(|i| DEFAULT_PALETTE[i % DEFAULT_PALETTE.len()])
                .collect();
        }
    }
    if let Some(t) = thr_plus {
        cfg.thr_plus = t;
    }
    if let Some(t) = thr_minus {
        cfg.thr_minus = t;
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;

    let variant = match variant {
        Variant::Dichotomy => DogVariant::Dichotomy,
        Variant::Gamma => DogVariant::Gamma,
        Variant::Plain => DogVariant::Plain,
    };

    let image = read_input(input)?;
    // the scale space is defined on a scalar field
    let gray = if image.channels() == 3 {
        image.to_grayscale().map_err(|e| CliError::Runtime(e.into()))?
    } else {
        image
    };

    let stack = build_stack(&gray, &cfg, variant).map_err(|e| match e {
        err @ Error::ImageTooSmall { .. } => CliError::Runtime(err.into()),
        err => CliError::Runtime(err.into()),
    })?;

    let mut cells = Vec::new();
    let mut aggregates = Vec::new();
    let mut overlays = Vec::new();

    for (li, level) in stack.levels.iter().enumerate() {
        for cell in &level.cells {
            let label = gamma_label(cell.gamma);
            let stem = format!("cells/level{li}_gamma{label}");
            let (resp_img, min, max) = response_to_image(&cell.response);
            let resp_file = format!("{stem}_response.png");
            let resp_sha = write_image_atomic(&out.join(&resp_file), &resp_img, 16)?;
            let sidecar = serde_json::json!({ "min": min, "max": max });
            write_atomic(
                &out.join(format!("{stem}_response.json")),
                serde_json::to_string_pretty(&sidecar)
                    .context("sidecar json")
                    .map_err(CliError::Runtime)?
                    .as_bytes(),
            )?;
            let mask_file = format!("{stem}_mask.png");
            let mask_sha = write_image_atomic(&out.join(&mask_file), &mask_to_image(&cell.mask), 8)?;
            cells.push(CellEntry {
                level: li,
                sigma2: level.sigma2,
                gamma: cell.gamma,
                t: level.t,
                delta_t: level.delta_t,
                width: cell.response.width,
                height: cell.response.height,
                response: resp_file,
                response_min: min,
                response_max: max,
                response_sha256: resp_sha,
                mask: mask_file,
                mask_sha256: mask_sha,
                positive_extrema: cell.mask.data.iter().filter(|&&m| m == 1).count(),
                negative_extrema: cell.mask.data.iter().filter(|&&m| m == -1).count(),
            });
        }

        let responses: Vec<_> = level.cells.iter().map(|c| c.response.clone()).collect();
        for (mode, name) in [(AggregateMode::Max, "max"), (AggregateMode::NegMin, "min")] {
            let agg = aggregate_over_gamma(&responses, mode)
                .map_err(|e| CliError::Runtime(e.into()))?;
            let (img, min, max) = response_to_image(&agg);
            let file = format!("aggregates/level{li}_{name}.png");
            let sha = write_image_atomic(&out.join(&file), &img, 16)?;
            aggregates.push(AggregateEntry {
                level: li,
                mode: name.to_string(),
                file,
                min,
                max,
                sha256: sha,
            });
        }

        let masks: Vec<_> = level.cells.iter().map(|c| c.mask.clone()).collect();
        let overlay = compose_gamma_overlay(&masks, &cfg.palette)
            .map_err(|e| CliError::Runtime(e.into()))?;
        let file = format!("overlays/level{li}.png");
        let sha = write_image_atomic(&out.join(&file), &overlay, 8)?;
        overlays.push(OverlayEntry {
            level: li,
            file,
            sha256: sha,
        });
    }

    let manifest = Manifest {
        version: 1,
        variant: format!("{variant:?}").to_lowercase(),
        input: input.display().to_string(),
        config: cfg,
        cells,
        aggregates,
        overlays,
    };
    let json = serde_json::to_string_pretty(&manifest)
        .context("manifest json")
        .map_err(CliError::Runtime)?;
    write_atomic(&out.join("manifest.json"), json.as_bytes())?;

    println!(
        "dogspace: {} cells, {} aggregates, {} overlays -> {}",
        manifest.cells.len(),
        manifest.aggregates.len(),
        manifest.overlays.len(),
        out.display()
    );
    Ok(())
}
