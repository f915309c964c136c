//! Gaussian scale space and its gamma-indexed difference-of-Gaussians variants.
//!
//! A pyramid is built by smoothing with variance `sigma^2` and decimating;
//! on each level the band-pass response `(L(t + dt) - L(t)) / dt` is computed
//! in three flavors: plain, after gamma correction, and after the dichotomy
//! transform. Thresholding the responses gives signed extrema masks, which
//! aggregate across the gamma axis into max/min maps and colored overlays.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dichotomy::{eval_unchecked, pow_gamma, DichotomyParams};
use crate::error::{Error, Result};
use crate::image::PlanarImage;

/// Signed per-pixel responses; same planar layout as [`PlanarImage`] but
/// without the unit-interval constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseImage {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<f64>,
}

impl ResponseImage {
    pub fn sample(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.data.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        })
    }
}

/// Ternary extrema mask: +1 above `thr_plus`, -1 below `thr_minus`, else 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedMask {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<i8>,
}

impl SignedMask {
    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }
}

/// Experiment parameters for the scale-space build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSpaceConfig {
    /// Smoothing variances, one pyramid level each.
    pub sigma2_levels: Vec<f64>,
    /// Gamma axis of the dichotomy / gamma-correction spaces.
    pub gamma_set: Vec<f64>,
    /// Numerator of the per-level DoG variance rule `t = numerator / sigma^2`.
    pub t_numerator: f64,
    /// Explicit DoG spacing; when absent it falls back to `(s^2 - 1) t`.
    pub delta_t: Option<f64>,
    /// Self-similar scale-sampling factor, only used when `delta_t` is unset.
    pub s: f64,
    pub thr_plus: f64,
    pub thr_minus: f64,
    /// Decimation divisor per level, aligned with `sigma2_levels`.
    pub subsample_factors: Vec<u32>,
    /// Overlay color per gamma, aligned with `gamma_set`.
    pub palette: Vec<[f64; 3]>,
}

/// Eight well-separated overlay hues for the default eight-gamma axis.
pub const DEFAULT_PALETTE: [[f64; 3]; 8] = [
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
    [1.0, 1.0, 0.0],
    [1.0, 0.0, 1.0],
    [0.0, 1.0, 1.0],
    [1.0, 0.5, 0.0],
    [0.5, 0.0, 1.0],
];

impl Default for ScaleSpaceConfig {
    fn default() -> Self {
        Self {
            sigma2_levels: vec![1.0, 2.0, 3.0, 4.0],
            gamma_set: vec![0.25, 0.38, 0.5, 1.2, 1.8, 2.0, 2.4, 4.0],
            t_numerator: 8.192,
            delta_t: Some(1.0),
            s: std::f64::consts::SQRT_2,
            thr_plus: 0.2,
            thr_minus: -0.2,
            subsample_factors: vec![1, 2, 3, 4],
            palette: DEFAULT_PALETTE.to_vec(),
        }
    }
}

impl ScaleSpaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sigma2_levels.is_empty() {
            return Err(Error::Domain("at least one sigma^2 level required".into()));
        }
        if self.sigma2_levels.iter().any(|&s| s.is_nan() || s <= 0.0) {
            return Err(Error::Domain("sigma^2 levels must be positive".into()));
        }
        if self.gamma_set.is_empty() {
            return Err(Error::Domain("at least one gamma required".into()));
        }
        if self.gamma_set.contains(&1.0) {
            return Err(Error::DegenerateGamma);
        }
        if self.gamma_set.iter().any(|&g| g.is_nan() || g < 0.0) {
            return Err(Error::Domain("gamma values must be nonnegative".into()));
        }
        if self.thr_plus.is_nan()
            || self.thr_minus.is_nan()
            || self.thr_plus <= 0.0
            || self.thr_minus >= 0.0
        {
            return Err(Error::Domain(format!(
                "thresholds must satisfy thr_plus > 0 > thr_minus, got {} / {}",
                self.thr_plus, self.thr_minus
            )));
        }
        if self.subsample_factors.len() != self.sigma2_levels.len() {
            return Err(Error::Domain(
                "one subsample factor per sigma^2 level required".into(),
            ));
        }
        if self.subsample_factors.contains(&0) {
            return Err(Error::Domain("subsample factors must be >= 1".into()));
        }
        if self.palette.len() < self.gamma_set.len() {
            return Err(Error::Domain(format!(
                "palette has {} colors for {} gammas",
                self.palette.len(),
                self.gamma_set.len()
            )));
        }
        if self.t_numerator.is_nan() || self.t_numerator <= 0.0 {
            return Err(Error::Domain("t numerator must be positive".into()));
        }
        Ok(())
    }

    pub fn t_for(&self, sigma2: f64) -> f64 {
        self.t_numerator / sigma2
    }

    pub fn delta_t_for(&self, t: f64) -> f64 {
        self.delta_t.unwrap_or((self.s * self.s - 1.0) * t)
    }
}

/// Separable convolution with a sampled Gaussian of variance `t`.
///
/// Kernel radius is `ceil(4 sqrt(t))`, the tail cut is renormalized to unit
/// sum, and borders replicate the edge sample.
pub fn gaussian_smooth(image: &PlanarImage, t: f64) -> PlanarImage {
    assert!(t > 0.0, "variance must be positive");
    let radius = (4.0 * t.sqrt()).ceil() as usize;
    let mut kernel = Vec::with_capacity(2 * radius + 1);
    for i in -(radius as i64)..=(radius as i64) {
        kernel.push((-(i * i) as f64 / (2.0 * t)).exp());
    }
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }

    let (w, h) = (image.width(), image.height());
    let mut out = vec![0.0f64; image.data().len()];
    for c in 0..image.channels() {
        let plane = image.plane(c);
        // horizontal pass
        let mut tmp = vec![0.0f64; w * h];
        tmp.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            let src = &plane[y * w..(y + 1) * w];
            for (x, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (ki, &kv) in kernel.iter().enumerate() {
                    let xi = (x + ki).saturating_sub(radius).min(w - 1);
                    acc += kv * src[xi];
                }
                *slot = acc;
            }
        });
        // vertical pass, written transposed-free by indexing columns
        let n = w * h;
        let dst = &mut out[c * n..(c + 1) * n];
        dst.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
            for (x, slot) in row.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (ki, &kv) in kernel.iter().enumerate() {
                    let yi = (y + ki).saturating_sub(radius).min(h - 1);
                    acc += kv * tmp[yi * w + x];
                }
                *slot = acc;
            }
        });
    }
    // unit-sum kernel on [0,1] samples keeps the range, up to rounding
    for v in &mut out {
        *v = v.clamp(0.0, 1.0);
    }
    PlanarImage::from_raw_unchecked(w, h, image.channels(), out, image.source_bit_depth)
}

/// Smooths with each `sigma^2` and decimates by the paired factor.
///
/// Decimation is block averaging; remainder pixels join the last block so
/// no content is dropped. Fails if any level would fall under 8x8.
pub fn build_pyramid(image: &PlanarImage, cfg: &ScaleSpaceConfig) -> Result<Vec<PlanarImage>> {
    cfg.validate()?;
    cfg.sigma2_levels
        .iter()
        .zip(&cfg.subsample_factors)
        .map(|(&sigma2, &factor)| {
            let out_w = image.width() / factor as usize;
            let out_h = image.height() / factor as usize;
            if out_w < 8 || out_h < 8 {
                return Err(Error::ImageTooSmall {
                    width: image.width(),
                    height: image.height(),
                    why: format!("level /{factor} would be {out_w}x{out_h}, minimum is 8x8"),
                });
            }
            let smoothed = gaussian_smooth(image, sigma2);
            Ok(decimate(&smoothed, factor as usize))
        })
        .collect()
}

fn decimate(image: &PlanarImage, factor: usize) -> PlanarImage {
    if factor == 1 {
        return image.clone();
    }
    let (w, h) = (image.width(), image.height());
    let out_w = w / factor;
    let out_h = h / factor;
    let mut data = Vec::with_capacity(out_w * out_h * image.channels());
    for c in 0..image.channels() {
        let plane = image.plane(c);
        for by in 0..out_h {
            let y_end = if by + 1 == out_h { h } else { (by + 1) * factor };
            for bx in 0..out_w {
                let x_end = if bx + 1 == out_w { w } else { (bx + 1) * factor };
                let mut acc = 0.0;
                let mut count = 0usize;
                for y in by * factor..y_end {
                    for x in bx * factor..x_end {
                        acc += plane[y * w + x];
                        count += 1;
                    }
                }
                data.push(acc / count as f64);
            }
        }
    }
    PlanarImage::from_raw_unchecked(out_w, out_h, image.channels(), data, image.source_bit_depth)
}

/// Which transform feeds the difference of smoothed images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DogVariant {
    Plain,
    Gamma,
    Dichotomy,
}

fn dog_from_smoothed(
    fine: &PlanarImage,
    coarse: &PlanarImage,
    delta_t: f64,
    pointwise: impl Fn(f64) -> f64 + Sync,
) -> ResponseImage {
    let data: Vec<f64> = coarse
        .data()
        .par_iter()
        .zip(fine.data().par_iter())
        .map(|(&l2, &l1)| (pointwise(l2) - pointwise(l1)) / delta_t)
        .collect();
    ResponseImage {
        width: fine.width(),
        height: fine.height(),
        channels: fine.channels(),
        data,
    }
}

/// Plain band-pass response `(L(t + dt) - L(t)) / dt`.
pub fn dog(image: &PlanarImage, t: f64, delta_t: f64) -> ResponseImage {
    let fine = gaussian_smooth(image, t);
    let coarse = gaussian_smooth(image, t + delta_t);
    dog_from_smoothed(&fine, &coarse, delta_t, |v| v)
}

/// Gamma-corrected response `(L(t + dt)^g - L(t)^g) / dt`; smoothing happens
/// before exponentiation, exactly as the definition composes.
pub fn dog_gamma(image: &PlanarImage, gamma: f64, t: f64, delta_t: f64) -> Result<ResponseImage> {
    if gamma < 0.0 {
        return Err(Error::Domain(format!("gamma = {gamma} must be nonnegative")));
    }
    let fine = gaussian_smooth(image, t);
    let coarse = gaussian_smooth(image, t + delta_t);
    Ok(dog_from_smoothed(&fine, &coarse, delta_t, |v| pow_gamma(v, gamma)))
}

/// Dichotomy-space response `k (|L(t+dt)^g - L(t+dt)| - |L(t)^g - L(t)|) / dt`.
///
/// In descending regions the local extrema come out with the opposite sign
/// of the gamma-correction space.
pub fn dog_dichotomy(
    image: &PlanarImage,
    gamma: f64,
    t: f64,
    delta_t: f64,
) -> Result<ResponseImage> {
    let params = DichotomyParams::from_gamma(gamma)?;
    let fine = gaussian_smooth(image, t);
    let coarse = gaussian_smooth(image, t + delta_t);
    Ok(dichotomy_response(&fine, &coarse, &params, delta_t))
}

fn dichotomy_response(
    fine: &PlanarImage,
    coarse: &PlanarImage,
    params: &DichotomyParams,
    delta_t: f64,
) -> ResponseImage {
    let k = params.k;
    let gamma = params.gamma;
    let mut resp = dog_from_smoothed(fine, coarse, delta_t, |v| eval_unchecked(v, gamma));
    for v in &mut resp.data {
        *v *= k;
    }
    resp
}

/// Keeps only strong responses: +1 at or above `thr_plus`, -1 at or below
/// `thr_minus`, 0 otherwise.
pub fn threshold_extrema(
    response: &ResponseImage,
    thr_plus: f64,
    thr_minus: f64,
) -> Result<SignedMask> {
    if thr_plus.is_nan() || thr_minus.is_nan() || thr_plus <= 0.0 || thr_minus >= 0.0 {
        return Err(Error::Domain(format!(
            "thresholds must satisfy thr_plus > 0 > thr_minus, got {thr_plus} / {thr_minus}"
        )));
    }
    let data = response
        .data
        .iter()
        .map(|&v| {
            if v >= thr_plus {
                1
            } else if v <= thr_minus {
                -1
            } else {
                0
            }
        })
        .collect();
    Ok(SignedMask {
        width: response.width,
        height: response.height,
        channels: response.channels,
        data,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateMode {
    /// Pixelwise maximum over the gamma axis.
    Max,
    /// Negated pixelwise minimum over the gamma axis.
    NegMin,
}

/// Collapses per-gamma responses into one map.
pub fn aggregate_over_gamma(
    responses: &[ResponseImage],
    mode: AggregateMode,
) -> Result<ResponseImage> {
    let first = responses
        .first()
        .ok_or_else(|| Error::Domain("at least one response required".into()))?;
    if let Some(bad) = responses.iter().find(|r| !r.same_geometry(first)) {
        return Err(Error::GeometryMismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            bad.width, bad.height, bad.channels, first.width, first.height, first.channels
        )));
    }
    let mut data = first.data.clone();
    for resp in &responses[1..] {
        for (slot, &v) in data.iter_mut().zip(&resp.data) {
            *slot = match mode {
                AggregateMode::Max => slot.max(v),
                AggregateMode::NegMin => slot.min(v),
            };
        }
    }
    if mode == AggregateMode::NegMin {
        for v in &mut data {
            *v = -*v;
        }
    }
    Ok(ResponseImage {
        width: first.width,
        height: first.height,
        channels: first.channels,
        data,
    })
}

/// Additively blends each gamma's palette color where its mask is nonzero.
///
/// Masks must be single-channel and share geometry; pixels detected under
/// several gammas blend toward composite hues, undetected pixels stay black.
pub fn compose_gamma_overlay(
    masks: &[SignedMask],
    palette: &[[f64; 3]],
) -> Result<PlanarImage> {
    let first = masks
        .first()
        .ok_or_else(|| Error::Domain("at least one mask required".into()))?;
    if palette.len() < masks.len() {
        return Err(Error::Domain(format!(
            "palette has {} colors for {} masks",
            palette.len(),
            masks.len()
        )));
    }
    if first.channels != 1 {
        return Err(Error::GeometryMismatch(
            "overlay composition expects single-channel masks".into(),
        ));
    }
    if let Some(bad) = masks.iter().find(|m| !m.same_geometry(first)) {
        return Err(Error::GeometryMismatch(format!(
            "{}x{} vs {}x{}",
            bad.width, bad.height, first.width, first.height
        )));
    }
    let n = first.width * first.height;
    let mut data = vec![0.0f64; 3 * n];
    for (mask, color) in masks.iter().zip(palette) {
        for (i, &m) in mask.data.iter().enumerate() {
            if m != 0 {
                for c in 0..3 {
                    data[c * n + i] = (data[c * n + i] + color[c]).min(1.0);
                }
            }
        }
    }
    Ok(PlanarImage::from_raw_unchecked(
        first.width,
        first.height,
        3,
        data,
        8,
    ))
}

/// One `(level, gamma)` cell of the stack.
#[derive(Debug, Clone)]
pub struct ScaleCell {
    pub gamma: f64,
    pub response: ResponseImage,
    pub mask: SignedMask,
}

/// One pyramid level with its smoothed pair and per-gamma cells.
#[derive(Debug, Clone)]
pub struct ScaleLevel {
    pub sigma2: f64,
    pub t: f64,
    pub delta_t: f64,
    pub subsample: u32,
    /// Level image after pyramid smoothing and decimation.
    pub base: PlanarImage,
    pub smooth_t: PlanarImage,
    pub smooth_t_dt: PlanarImage,
    pub cells: Vec<ScaleCell>,
}

#[derive(Debug, Clone)]
pub struct ScaleSpaceStack {
    pub variant: DogVariant,
    pub config: ScaleSpaceConfig,
    pub levels: Vec<ScaleLevel>,
}

/// Builds the full stack: pyramid, per-level smoothed pair, and one response
/// plus extrema mask per gamma (a single cell for the plain variant).
///
/// Cells are independent and fan out across the thread pool; the result is
/// deterministic for any thread count.
pub fn build_stack(
    image: &PlanarImage,
    cfg: &ScaleSpaceConfig,
    variant: DogVariant,
) -> Result<ScaleSpaceStack> {
    let pyramid = build_pyramid(image, cfg)?;
    let params: Vec<DichotomyParams> = match variant {
        DogVariant::Dichotomy => cfg
            .gamma_set
            .iter()
            .map(|&g| DichotomyParams::from_gamma(g))
            .collect::<Result<_>>()?,
        _ => Vec::new(),
    };

    let levels = pyramid
        .into_iter()
        .enumerate()
        .map(|(i, base)| {
            let sigma2 = cfg.sigma2_levels[i];
            let t = cfg.t_for(sigma2);
            let delta_t = cfg.delta_t_for(t);
            let smooth_t = gaussian_smooth(&base, t);
            let smooth_t_dt = gaussian_smooth(&base, t + delta_t);
            let gammas: Vec<f64> = match variant {
                DogVariant::Plain => vec![1.0],
                _ => cfg.gamma_set.clone(),
            };
            let cells = gammas
                .par_iter()
                .enumerate()
                .map(|(gi, &gamma)| {
                    let response = match variant {
                        DogVariant::Plain => {
                            dog_from_smoothed(&smooth_t, &smooth_t_dt, delta_t, |v| v)
                        }
                        DogVariant::Gamma => dog_from_smoothed(
                            &smooth_t,
                            &smooth_t_dt,
                            delta_t,
                            |v| pow_gamma(v, gamma),
                        ),
                        DogVariant::Dichotomy => {
                            dichotomy_response(&smooth_t, &smooth_t_dt, &params[gi], delta_t)
                        }
                    };
                    let mask = threshold_extrema(&response, cfg.thr_plus, cfg.thr_minus)?;
                    Ok(ScaleCell {
                        gamma,
                        response,
                        mask,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ScaleLevel {
                sigma2,
                t,
                delta_t,
                subsample: cfg.subsample_factors[i],
                base,
                smooth_t,
                smooth_t_dt,
                cells,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ScaleSpaceStack {
        variant,
        config: cfg.clone(),
        levels,
    })
}
