use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;

use dichotome_core::metrics::{gamma_sweep, sweep_argmax, BenchPair};

use crate::config::parse_gamma_grid;
use crate::output::write_atomic;
use crate::{CliError, CliResult};

/// Accepts either `<dir>/{low,high}` or the distribution layout
/// `<dir>/eval15/{low,high}`.
fn resolve_layout(dataset: &Path) -> Result<PathBuf, CliError> {
    for candidate in [dataset.join("eval15"), dataset.to_path_buf()] {
        if candidate.join("low").is_dir() && candidate.join("high").is_dir() {
            return Ok(candidate);
        }
    }
    Err(CliError::Runtime(anyhow::anyhow!(
        "no low/ and high/ directories under {}",
        dataset.display()
    )))
}

fn load_pairs(root: &Path) -> Result<Vec<BenchPair>, CliError> {
    let low_dir = root.join("low");
    let mut names: Vec<String> = std::fs::read_dir(&low_dir)
        .with_context(|| format!("listing {}", low_dir.display()))
        .map_err(CliError::Runtime)?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| {
            let lower = n.to_ascii_lowercase();
            lower.ends_with(".png") || lower.ends_with(".jpg") || lower.ends_with(".jpeg")
        })
        .collect();
    names.sort();

    let mut pairs = Vec::new();
    for name in names {
        let low_path = root.join("low").join(&name);
        let high_path = root.join("high").join(&name);
        let low = match dichotome_core::image::io::read_image(&low_path) {
            Ok(img) => img,
            Err(err) => {
                log::warn!("skipping unreadable pair {name}: {err}");
                continue;
            }
        };
        let normal = match dichotome_core::image::io::read_image(&high_path) {
            Ok(img) => img,
            Err(err) => {
                log::warn!("skipping pair {name} with unreadable mate: {err}");
                continue;
            }
        };
        pairs.push(BenchPair { name, low, normal });
    }
    if pairs.is_empty() {
        return Err(CliError::Runtime(anyhow::anyhow!(
            "no readable low/high pairs under {}",
            root.display()
        )));
    }
    Ok(pairs)
}

pub fn run(dataset: &Path, out: &Path, gammas: &str) -> CliResult {
    let grid = parse_gamma_grid(gammas).map_err(|e| CliError::Usage(format!("{e:#}")))?;
    let root = resolve_layout(dataset)?;
    let pairs = load_pairs(&root)?;
    println!(
        "bench: {} pairs from {}, {} gamma values",
        pairs.len(),
        root.display(),
        grid.len()
    );

    let records = gamma_sweep(&pairs, &grid).map_err(|e| CliError::Runtime(e.into()))?;

    let mut csv = String::from("gamma,psnr_mean,psnr_std,ssim_mean,ssim_std\n");
    for r in &records {
        let _ = writeln!(
            csv,
            "{},{:.6},{:.6},{:.6},{:.6}",
            r.gamma, r.psnr_mean, r.psnr_std, r.ssim_mean, r.ssim_std
        );
    }
    write_atomic(&out.join("sweep.csv"), csv.as_bytes())?;

    let json = serde_json::to_string_pretty(&records)
        .context("sweep json")
        .map_err(CliError::Runtime)?;
    write_atomic(&out.join("sweep.json"), json.as_bytes())?;

    if let Some((pi, si)) = sweep_argmax(&records) {
        let p = &records[pi];
        let s = &records[si];
        println!(
            "PSNR max {:.4} +- {:.4} dB at gamma={} (SSIM there {:.4})",
            p.psnr_mean, p.psnr_std, p.gamma, p.ssim_mean
        );
        println!(
            "SSIM max {:.4} +- {:.4} at gamma={} (PSNR there {:.4} dB)",
            s.ssim_mean, s.ssim_std, s.gamma, s.psnr_mean
        );
    }
    println!("wrote sweep.csv and sweep.json -> {}", out.display());
    Ok(())
}
