//! Quantitative evaluation: patch entropy, PSNR, SSIM, and the gamma sweep.
//!
//! Entropy is Shannon entropy of the 8-bit gray-level histogram inside each
//! patch of a mesh, a proxy for local contrast. PSNR and SSIM follow their
//! standard definitions (SSIM with the 11x11 Gaussian window, sigma 1.5,
//! K1 = 0.01, K2 = 0.03); both are symmetric in their arguments. The gamma
//! sweep scores dichotomy enhancement against paired references over a grid
//! of gamma values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{quantize, PlanarImage, Raster};
use crate::transform::enhance;

/// Per-patch entropies of a rows x cols mesh, in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major patch entropies, each in `[0, 8]`.
    pub values: Vec<f64>,
}

impl EntropyGrid {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Shannon entropy of the gray-level histogram per mesh patch.
///
/// Patch edges come from integer division of the image size; remainder
/// pixels are absorbed by the last row/column of patches, so patch sizes
/// are not all equal. Requires an 8-bit single-channel raster at least as
/// large as the mesh.
pub fn patch_entropy(raster: &Raster, rows: usize, cols: usize) -> Result<EntropyGrid> {
    if raster.bit_depth != 8 || raster.channels != 1 {
        return Err(Error::Domain(
            "patch entropy expects an 8-bit grayscale raster".into(),
        ));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Domain("mesh must be at least 1x1".into()));
    }
    if raster.height < rows || raster.width < cols {
        return Err(Error::ImageTooSmall {
            width: raster.width,
            height: raster.height,
            why: format!("mesh {rows}x{cols} needs at least one pixel per patch"),
        });
    }
    let (w, h) = (raster.width, raster.height);
    let (ph, pw) = (h / rows, w / cols);
    let plane = raster.plane(0);
    let mut values = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let y0 = r * ph;
        let y1 = if r + 1 == rows { h } else { (r + 1) * ph };
        for c in 0..cols {
            let x0 = c * pw;
            let x1 = if c + 1 == cols { w } else { (c + 1) * pw };
            let mut hist = [0u32; 256];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[plane[y * w + x] as usize] += 1;
                }
            }
            let total = ((y1 - y0) * (x1 - x0)) as f64;
            let h_bits: f64 = hist
                .iter()
                .filter(|&&n| n > 0)
                .map(|&n| {
                    let p = f64::from(n) / total;
                    -p * p.log2()
                })
                .sum();
            // a single-bin histogram sums to -0.0
            values.push(h_bits.max(0.0));
        }
    }
    Ok(EntropyGrid { rows, cols, values })
}

/// Histogram of patch entropies over equal-width bins on `[0, 8]`; the
/// value 8 itself lands in the last bin.
pub fn entropy_histogram(grid: &EntropyGrid, bins: usize) -> Vec<usize> {
    assert!(bins >= 1, "bins must be >= 1");
    let mut counts = vec![0usize; bins];
    let width = 8.0 / bins as f64;
    for &v in &grid.values {
        let idx = ((v / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
}

/// Peak signal-to-noise ratio in decibels over all samples and channels.
///
/// Identical inputs have zero error and report the `+inf` sentinel.
pub fn psnr(reference: &Raster, candidate: &Raster) -> Result<f64> {
    if !reference.same_geometry(candidate) {
        return Err(Error::GeometryMismatch(
            "psnr operands must share geometry and bit depth".into(),
        ));
    }
    let mse: f64 = reference
        .data
        .iter()
        .zip(&candidate.data)
        .map(|(&a, &b)| {
            let d = f64::from(a) - f64::from(b);
            d * d
        })
        .sum::<f64>()
        / reference.data.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    let max = f64::from(reference.max_level());
    Ok(10.0 * (max * max / mse).log10())
}

const SSIM_WINDOW_RADIUS: usize = 5;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// Mean structural similarity with the 11x11 Gaussian window.
///
/// Local statistics are Gaussian-weighted moments; the similarity map is
/// cropped by the window radius before averaging so every kept window is
/// fully interior. Color scores are the mean of the per-channel scores.
pub fn ssim(reference: &Raster, candidate: &Raster) -> Result<f64> {
    if !reference.same_geometry(candidate) {
        return Err(Error::GeometryMismatch(
            "ssim operands must share geometry and bit depth".into(),
        ));
    }
    let win = 2 * SSIM_WINDOW_RADIUS + 1;
    if reference.width < win || reference.height < win {
        return Err(Error::ImageTooSmall {
            width: reference.width,
            height: reference.height,
            why: format!("ssim needs at least {win}x{win} pixels"),
        });
    }
    let dynamic_range = f64::from(reference.max_level());
    let c1 = (SSIM_K1 * dynamic_range).powi(2);
    let c2 = (SSIM_K2 * dynamic_range).powi(2);

    let scores: Vec<f64> = (0..reference.channels)
        .map(|c| {
            let x: Vec<f64> = reference.plane(c).iter().map(|&v| f64::from(v)).collect();
            let y: Vec<f64> = candidate.plane(c).iter().map(|&v| f64::from(v)).collect();
            ssim_plane(&x, &y, reference.width, reference.height, c1, c2)
        })
        .collect();
    Ok(scores.iter().sum::<f64>() / scores.len() as f64)
}

fn ssim_plane(x: &[f64], y: &[f64], width: usize, height: usize, c1: f64, c2: f64) -> f64 {
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();

    let mu_x = gaussian_window_filter(x, width, height);
    let mu_y = gaussian_window_filter(y, width, height);
    let e_xx = gaussian_window_filter(&xx, width, height);
    let e_yy = gaussian_window_filter(&yy, width, height);
    let e_xy = gaussian_window_filter(&xy, width, height);

    let r = SSIM_WINDOW_RADIUS;
    let mut acc = 0.0;
    let mut count = 0usize;
    for yi in r..height - r {
        for xi in r..width - r {
            let i = yi * width + xi;
            let (ux, uy) = (mu_x[i], mu_y[i]);
            let vx = e_xx[i] - ux * ux;
            let vy = e_yy[i] - uy * uy;
            let vxy = e_xy[i] - ux * uy;
            let s = ((2.0 * ux * uy + c1) * (2.0 * vxy + c2))
                / ((ux * ux + uy * uy + c1) * (vx + vy + c2));
            acc += s;
            count += 1;
        }
    }
    acc / count as f64
}

/// Separable Gaussian-weighted local mean with the fixed SSIM window.
fn gaussian_window_filter(data: &[f64], width: usize, height: usize) -> Vec<f64> {
    let r = SSIM_WINDOW_RADIUS;
    let mut kernel = [0.0f64; 2 * SSIM_WINDOW_RADIUS + 1];
    for (i, w) in kernel.iter_mut().enumerate() {
        let d = i as f64 - r as f64;
        *w = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }

    let mut tmp = vec![0.0f64; data.len()];
    tmp.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        let src = &data[y * width..(y + 1) * width];
        for (x, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (ki, &kv) in kernel.iter().enumerate() {
                let xi = (x + ki).saturating_sub(r).min(width - 1);
                acc += kv * src[xi];
            }
            *slot = acc;
        }
    });
    let mut out = vec![0.0f64; data.len()];
    out.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        for (x, slot) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (ki, &kv) in kernel.iter().enumerate() {
                let yi = (y + ki).saturating_sub(r).min(height - 1);
                acc += kv * tmp[yi * width + x];
            }
            *slot = acc;
        }
    });
    out
}

/// One low/normal pair of the benchmark set.
#[derive(Debug, Clone)]
pub struct BenchPair {
    pub name: String,
    pub low: PlanarImage,
    pub normal: PlanarImage,
}

/// Per-pair scores at one gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub name: String,
    pub psnr: f64,
    pub ssim: f64,
}

/// Sweep entry: mean and sample standard deviation over the pair set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub gamma: f64,
    pub psnr_mean: f64,
    pub psnr_std: f64,
    pub ssim_mean: f64,
    pub ssim_std: f64,
    pub scores: Vec<PairScore>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (values.len() - 1) as f64;
    (mean, var.sqrt())
}

/// Enhances every low image at each gamma, quantizes to 8 bits, and scores
/// it against its normal mate.
///
/// Infinite PSNR values (identical pair) are excluded from the mean with a
/// warning; per-pair failures are logged and skipped rather than fatal.
pub fn gamma_sweep(pairs: &[BenchPair], gammas: &[f64]) -> Result<Vec<BenchmarkRecord>> {
    for pair in pairs {
        if !pair.low.same_geometry(&pair.normal) {
            return Err(Error::GeometryMismatch(format!(
                "pair {}: low and normal images differ in geometry",
                pair.name
            )));
        }
    }
    gammas
        .iter()
        .map(|&gamma| {
            let scores: Vec<PairScore> = pairs
                .par_iter()
                .filter_map(|pair| match score_pair(pair, gamma) {
                    Ok(score) => Some(score),
                    Err(err) => {
                        log::warn!("pair {} skipped at gamma {gamma}: {err}", pair.name);
                        None
                    }
                })
                .collect();
            let finite_psnr: Vec<f64> = scores
                .iter()
                .map(|s| s.psnr)
                .filter(|v| {
                    if v.is_finite() {
                        true
                    } else {
                        log::warn!("infinite PSNR excluded from the mean at gamma {gamma}");
                        false
                    }
                })
                .collect();
            let ssim_vals: Vec<f64> = scores.iter().map(|s| s.ssim).collect();
            let (psnr_mean, psnr_std) = mean_std(&finite_psnr);
            let (ssim_mean, ssim_std) = mean_std(&ssim_vals);
            Ok(BenchmarkRecord {
                gamma,
                psnr_mean,
                psnr_std,
                ssim_mean,
                ssim_std,
                scores,
            })
        })
        .collect()
}

fn score_pair(pair: &BenchPair, gamma: f64) -> Result<PairScore> {
    let (enhanced, _) = enhance(&pair.low, gamma)?;
    let candidate = quantize(&enhanced, 8);
    let reference = quantize(&pair.normal, 8);
    Ok(PairScore {
        name: pair.name.clone(),
        psnr: psnr(&reference, &candidate)?,
        ssim: ssim(&reference, &candidate)?,
    })
}

/// Indices of the records with the best mean PSNR and best mean SSIM.
pub fn sweep_argmax(records: &[BenchmarkRecord]) -> Option<(usize, usize)> {
    let best = |f: fn(&BenchmarkRecord) -> f64| {
        records
            .iter()
            .enumerate()
            .filter(|(_, r)| f(r).is_finite())
            .max_by(|(_, a), (_, b)| f(a).partial_cmp(&f(b)).unwrap())
            .map(|(i, _)| i)
    };
    Some((best(|r| r.psnr_mean)?, best(|r| r.ssim_mean)?))
}

/// Convenience used by tests and the CLI: dequantized grayscale of a raster.
pub fn gray_raster(image: &PlanarImage) -> Result<Raster> {
    let gray = if image.channels() == 3 {
        image.to_grayscale()?
    } else {
        image.clone()
    };
    Ok(quantize(&gray, 8))
}
