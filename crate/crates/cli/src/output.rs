//! Output plumbing: atomic writes, response encoding, and the heatmap.
//!
//! Everything lands on disk through a temp-file-and-rename so interrupted
//! runs never leave truncated artifacts.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use dichotome_core::image::io::encode_for_path;
use dichotome_core::scalespace::{ResponseImage, SignedMask};
use dichotome_core::PlanarImage;

/// Writes bytes atomically (temp file in the target directory, then rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Encodes an image for its path and writes it atomically; returns the
/// content hash for the manifest.
pub fn write_image_atomic(path: &Path, image: &PlanarImage, depth: u8) -> Result<String> {
    let bytes = encode_for_path(path, image, depth)
        .with_context(|| format!("encoding {}", path.display()))?;
    write_atomic(path, &bytes)?;
    Ok(sha256_hex(&bytes))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}

/// Affine-maps a signed response onto `[0, 1]` for 16-bit storage; the
/// recorded range lets a reader recover the raw values.
pub fn response_to_image(resp: &ResponseImage) -> (PlanarImage, f64, f64) {
    let (min, max) = resp.min_max();
    let span = max - min;
    let data: Vec<f64> = if span > 0.0 {
        resp.data.iter().map(|&v| ((v - min) / span).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; resp.data.len()]
    };
    let img = PlanarImage::new(resp.width, resp.height, resp.channels, data, 16)
        .expect("mapped response is a valid image");
    (img, min, max)
}

/// Renders a signed mask with the usual coding: positive extrema red,
/// negative green, background black.
pub fn mask_to_image(mask: &SignedMask) -> PlanarImage {
    let n = mask.width * mask.height;
    let mut data = vec![0.0f64; 3 * n];
    for (i, &m) in mask.data.iter().enumerate() {
        match m {
            1 => data[i] = 1.0,
            -1 => data[n + i] = 1.0,
            _ => {}
        }
    }
    PlanarImage::new(mask.width, mask.height, 3, data, 8).expect("mask geometry is valid")
}

/// Five-stop colormap from black through blue/magenta/orange to white,
/// for entropy heatmaps. `v` is expected in `[0, 1]`.
pub fn heat_color(v: f64) -> [f64; 3] {
    const STOPS: [(f64, [f64; 3]); 5] = [
        (0.0, [0.0, 0.0, 0.0]),
        (0.25, [0.1, 0.0, 0.55]),
        (0.5, [0.75, 0.1, 0.45]),
        (0.75, [0.98, 0.55, 0.1]),
        (1.0, [1.0, 1.0, 1.0]),
    ];
    let v = v.clamp(0.0, 1.0);
    for pair in STOPS.windows(2) {
        let (a, ca) = pair[0];
        let (b, cb) = pair[1];
        if v <= b {
            let t = (v - a) / (b - a);
            return [
                ca[0] + t * (cb[0] - ca[0]),
                ca[1] + t * (cb[1] - ca[1]),
                ca[2] + t * (cb[2] - ca[2]),
            ];
        }
    }
    [1.0, 1.0, 1.0]
}

/// Formats a gamma value for file names (trailing zeros trimmed by Display).
pub fn gamma_label(gamma: f64) -> String {
    format!("{gamma}")
}
