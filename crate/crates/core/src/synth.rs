//! Deterministic synthetic images for tests, demos, and the shipped fixtures.
//!
//! Everything here is procedural: scenes come from closed-form fields and
//! noise comes from a fixed 64-bit LCG, so the same call always produces the
//! same bytes on every platform.

use crate::image::PlanarImage;

/// Byte stream of the reference LCG (stateful Knuth multiplier).
pub fn lcg_bytes(seed: u64, n: usize) -> Vec<u8> {
    let mut state = seed;
    (0..n)
        .map(|_| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 56) as u8
        })
        .collect()
}

/// Smooth base scene: gradient, gentle sines, and one bright blob.
fn scene(u: f64, v: f64) -> f64 {
    let val = 0.35 + 0.30 * u + 0.15 * (6.0 * u + 2.0 * v).sin() * (4.0 * v).cos();
    let blob = 0.35 * (-((u - 0.6).powi(2) + (v - 0.45).powi(2)) / 0.02).exp();
    (val + blob).clamp(0.0, 1.0)
}

fn channel_gain(c: usize) -> f64 {
    match c {
        0 => 1.0,
        1 => 0.93,
        _ => 0.85,
    }
}

/// Too-dark photograph: the smooth scene compressed into `[0, ~0.24]` with
/// faint sinusoidal texture so patches keep a handful of distinct levels.
pub fn underexposed(size: usize) -> PlanarImage {
    let d = (size - 1) as f64;
    PlanarImage::from_fn(size, size, 3, |x, y, c| {
        let (u, v) = (x as f64 / d, y as f64 / d);
        let texture = 0.012 * (40.0 * u).sin() * (37.0 * v).sin();
        ((0.215 * scene(u, v) + 0.012 + texture) * channel_gain(c)).clamp(0.0, 1.0)
    })
    .expect("valid geometry")
}

/// Too-bright photograph: values pushed toward white with burned highlights.
pub fn overexposed(size: usize) -> PlanarImage {
    let d = (size - 1) as f64;
    PlanarImage::from_fn(size, size, 3, |x, y, c| {
        let (u, v) = (x as f64 / d, y as f64 / d);
        let texture = 0.012 * (33.0 * u).cos() * (29.0 * v).sin();
        ((0.74 + 0.38 * scene(u, v) + texture) * (0.97 + 0.03 * channel_gain(c))).clamp(0.0, 1.0)
    })
    .expect("valid geometry")
}

/// Mixed exposure: a dark textured bird-like shape over a bright gradient
/// background. Kept noise-free so smoothing identities hold tightly on it.
pub fn mixed_scene(size: usize) -> PlanarImage {
    let d = (size - 1) as f64;
    PlanarImage::from_fn(size, size, 3, |x, y, c| {
        let (u, v) = (x as f64 / d, y as f64 / d);
        let bg = 0.70 + 0.22 * v + 0.06 * (7.0 * u + 1.3).sin();
        let du = (u - 0.45) / 0.20;
        let dv = (v - 0.55) / 0.30;
        let inside = du * du + dv * dv < 1.0;
        let value = if inside {
            0.06 + 0.12 * ((9.0 * u).sin() * (7.0 * v).cos()).abs()
        } else {
            bg
        };
        (value * (0.94 + 0.06 * channel_gain(c))).clamp(0.0, 1.0)
    })
    .expect("valid geometry")
}

/// Horizontal grayscale ramp from 0 to 1.
pub fn ramp(width: usize, height: usize) -> PlanarImage {
    PlanarImage::from_fn(width, height, 1, |x, _, _| x as f64 / (width - 1) as f64)
        .expect("valid geometry")
}

/// Binary checkerboard of `block`-pixel squares.
pub fn checkerboard(size: usize, block: usize) -> PlanarImage {
    PlanarImage::from_fn(size, size, 1, |x, y, _| {
        f64::from((x / block + y / block).is_multiple_of(2))
    })
    .expect("valid geometry")
}

/// LCG-noise grayscale raster data for metric fixtures.
pub fn lcg_gray(seed: u64, width: usize, height: usize) -> Vec<u16> {
    lcg_bytes(seed, width * height)
        .into_iter()
        .map(u16::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_is_stable() {
        // first bytes of the seed-42 stream, shared with the metric oracles
        let bytes = lcg_bytes(42, 4);
        assert_eq!(bytes, lcg_bytes(42, 4));
        assert_ne!(lcg_bytes(42, 8), lcg_bytes(43, 8));
    }

    #[test]
    fn exposure_ranges() {
        let dark = underexposed(64);
        assert!(dark.data().iter().all(|&v| v <= 0.26));
        let bright = overexposed(64);
        assert!(bright.data().iter().all(|&v| v >= 0.55));
        assert!(bright.data().contains(&1.0), "highlights should clip");
        let mixed = mixed_scene(64);
        assert!(mixed.data().iter().any(|&v| v < 0.2));
        assert!(mixed.data().iter().any(|&v| v > 0.8));
    }

    #[test]
    fn ramp_and_checker_shapes() {
        let r = ramp(16, 4);
        assert_eq!(r.sample(0, 0, 0), 0.0);
        assert_eq!(r.sample(15, 0, 0), 1.0);
        let cb = checkerboard(8, 2);
        assert_eq!(cb.sample(0, 0, 0), 1.0);
        assert_eq!(cb.sample(2, 0, 0), 0.0);
        assert_eq!(cb.sample(2, 2, 0), 1.0);
    }
}
