//! Dogspace run configuration: a small versioned TOML file whose values the
//! command-line flags override.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;

use dichotome_core::scalespace::{ScaleSpaceConfig, DEFAULT_PALETTE};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DogspaceFile {
    pub version: u32,
    pub sigma2: Option<Vec<f64>>,
    pub gammas: Option<Vec<f64>>,
    pub t_numerator: Option<f64>,
    pub delta_t: Option<f64>,
    pub s: Option<f64>,
    pub thr_plus: Option<f64>,
    pub thr_minus: Option<f64>,
    pub subsample: Option<Vec<u32>>,
    /// Hex colors like "#ff8000", one per gamma.
    pub palette: Option<Vec<String>>,
}

pub fn load(path: &Path) -> Result<ScaleSpaceConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let file: DogspaceFile =
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    if file.version != CONFIG_VERSION {
        anyhow::bail!(
            "config version {} unsupported (expected {CONFIG_VERSION})",
            file.version
        );
    }
    let mut cfg = ScaleSpaceConfig::default();
    if let Some(sigma2) = file.sigma2 {
        // keep the default ladder rule when the file doesn't pin one
        if file.subsample.is_none() {
            cfg.subsample_factors = (1..=sigma2.len() as u32).collect();
        }
        cfg.sigma2_levels = sigma2;
    }
    if let Some(gammas) = file.gammas {
        cfg.gamma_set = gammas;
    }
    if let Some(t) = file.t_numerator {
        cfg.t_numerator = t;
    }
    match (file.delta_t, file.s) {
        (Some(dt), _) => cfg.delta_t = Some(dt),
        (None, Some(s)) => {
            cfg.delta_t = None;
            cfg.s = s;
        }
        (None, None) => {}
    }
    if let Some(t) = file.thr_plus {
        cfg.thr_plus = t;
    }
    if let Some(t) = file.thr_minus {
        cfg.thr_minus = t;
    }
    if let Some(sub) = file.subsample {
        cfg.subsample_factors = sub;
    }
    if let Some(palette) = file.palette {
        cfg.palette = palette
            .iter()
            .map(|hex| parse_hex_color(hex))
            .collect::<Result<_>>()?;
    } else if cfg.gamma_set.len() > cfg.palette.len() {
        // recycle the default hues for long custom gamma axes
        cfg.palette = (0..cfg.gamma_set.len())
            .map(|i| DEFAULT_PALETTE[i % DEFAULT_PALETTE.len()])
            .collect();
    }
    Ok(cfg)
}

pub fn parse_hex_color(hex: &str) -> Result<[f64; 3]> {
    let raw = hex.trim_start_matches('#');
    anyhow::ensure!(raw.len() == 6, "color {hex:?} must be #rrggbb");
    let byte = |i: usize| -> Result<f64> {
        let v = u8::from_str_radix(&raw[i..i + 2], 16)
            .with_context(|| format!("color {hex:?} is not hex"))?;
        Ok(f64::from(v) / 255.0)
    };
    Ok([byte(0)?, byte(2)?, byte(4)?])
}

/// Comma-separated gamma list without any filtering; range validation
/// happens downstream (a listed identity is a configuration error).
pub fn parse_gamma_list(spec: &str) -> Result<Vec<f64>> {
    let values: Vec<f64> = spec
        .split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("gamma {v:?}")))
        .collect::<Result<_>>()?;
    anyhow::ensure!(!values.is_empty(), "empty gamma list");
    Ok(values)
}

/// Expands "START:STEP:END" or a comma-separated list into gamma values.
pub fn parse_gamma_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let values: Vec<f64> = if parts.len() == 3 {
        let start: f64 = parts[0].trim().parse().context("grid start")?;
        let step: f64 = parts[1].trim().parse().context("grid step")?;
        let end: f64 = parts[2].trim().parse().context("grid end")?;
        anyhow::ensure!(step > 0.0 && end >= start, "grid must satisfy start <= end, step > 0");
        let count = ((end - start) / step + 0.5).floor() as usize;
        (0..=count).map(|i| start + step * i as f64).collect()
    } else {
        spec.split(',')
            .map(|v| v.trim().parse::<f64>().with_context(|| format!("gamma {v:?}")))
            .collect::<Result<_>>()?
    };
    anyhow::ensure!(!values.is_empty(), "empty gamma grid");
    anyhow::ensure!(
        values.iter().all(|&g| g >= 0.0),
        "gamma values must be nonnegative"
    );
    // the identity is skipped rather than fatal: sweeps are defined around it
    let kept: Vec<f64> = values.iter().copied().filter(|g| (g - 1.0).abs() > 1e-9).collect();
    if kept.len() != values.len() {
        log::warn!("gamma = 1 removed from the grid (identity has no dichotomy)");
    }
    anyhow::ensure!(!kept.is_empty(), "gamma grid contains only the identity");
    Ok(kept)
}
