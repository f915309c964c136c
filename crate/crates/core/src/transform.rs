//! Whole-image dichotomy enhancement, slope classification, and inversion.
//!
//! Every operation is pointwise per channel, so geometry never changes and
//! pixels can be processed in parallel with results identical to the
//! sequential order. The [`TransformRecord`] produced next to an enhanced
//! image carries everything inversion needs: the parameters, the branch of
//! every sample, and (for integer sources) the forward lookup table.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dichotomy::{
    build_lut, invert_golden, normalized_unchecked, Branch, DichotomyLut, DichotomyParams,
    GoldenSearchConfig,
};
use crate::error::{Error, Result};
use crate::image::PlanarImage;

/// Per-pixel, per-channel branch tags in the image's planar layout.
///
/// Serializes run-length encoded: `{width, height, channels, runs: [[n, tag]]}`
/// with tag 0 for ascending and 1 for descending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RleClassMap", into = "RleClassMap")]
pub struct SlopeClassMap {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub tags: Vec<Branch>,
}

impl SlopeClassMap {
    pub fn tag(&self, x: usize, y: usize, c: usize) -> Branch {
        self.tags[(c * self.height + y) * self.width + x]
    }

    pub fn count_ascending(&self) -> usize {
        self.tags.iter().filter(|t| **t == Branch::Ascending).count()
    }
}

#[derive(Serialize, Deserialize)]
struct RleClassMap {
    width: usize,
    height: usize,
    channels: usize,
    runs: Vec<(u64, u8)>,
}

impl From<SlopeClassMap> for RleClassMap {
    fn from(map: SlopeClassMap) -> Self {
        let mut runs: Vec<(u64, u8)> = Vec::new();
        for tag in &map.tags {
            let code = u8::from(*tag == Branch::Descending);
            match runs.last_mut() {
                Some((n, c)) if *c == code => *n += 1,
                _ => runs.push((1, code)),
            }
        }
        Self {
            width: map.width,
            height: map.height,
            channels: map.channels,
            runs,
        }
    }
}

impl TryFrom<RleClassMap> for SlopeClassMap {
    type Error = Error;

    fn try_from(rle: RleClassMap) -> Result<Self> {
        let expected = rle.width * rle.height * rle.channels;
        let mut tags = Vec::with_capacity(expected);
        for (n, code) in rle.runs {
            let tag = match code {
                0 => Branch::Ascending,
                1 => Branch::Descending,
                other => {
                    return Err(Error::RecordMismatch(format!("unknown branch tag {other}")))
                }
            };
            tags.extend(std::iter::repeat_n(tag, n as usize));
        }
        if tags.len() != expected {
            return Err(Error::RecordMismatch(format!(
                "run lengths cover {} samples, geometry needs {expected}",
                tags.len()
            )));
        }
        Ok(Self {
            width: rle.width,
            height: rle.height,
            channels: rle.channels,
            tags,
        })
    }
}

/// Everything needed to undo an enhancement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformRecord {
    pub params: DichotomyParams,
    pub class_map: SlopeClassMap,
    /// Present whenever the source was integer-valued (8 or 16 bits).
    pub lut: Option<DichotomyLut>,
    pub source_bit_depth: u8,
}

impl TransformRecord {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let record: Self = serde_json::from_str(json)?;
        if let Some(lut) = &record.lut {
            if lut.gamma != record.params.gamma {
                return Err(Error::RecordMismatch(format!(
                    "lut gamma {} != params gamma {}",
                    lut.gamma, record.params.gamma
                )));
            }
        }
        Ok(record)
    }
}

/// Applies `k * |x^g - x|` to every sample, independently per channel.
///
/// Returns the enhanced image and the record required to invert it. The
/// branch of each sample is decided on the input value against `d_max`.
pub fn enhance(image: &PlanarImage, gamma: f64) -> Result<(PlanarImage, TransformRecord)> {
    let params = DichotomyParams::from_gamma(gamma)?;
    let pairs: Vec<(f64, Branch)> = image
        .data()
        .par_iter()
        .map(|&x| (normalized_unchecked(x, &params), params.branch_of(x)))
        .collect();
    let (data, tags): (Vec<f64>, Vec<Branch>) = pairs.into_iter().unzip();
    let out = PlanarImage::from_raw_unchecked(
        image.width(),
        image.height(),
        image.channels(),
        data,
        image.source_bit_depth,
    );
    let lut = match image.source_bit_depth {
        8 => Some(build_lut(gamma, 255)?),
        16 => Some(build_lut(gamma, 65535)?),
        _ => None,
    };
    let record = TransformRecord {
        params,
        class_map: SlopeClassMap {
            width: image.width(),
            height: image.height(),
            channels: image.channels(),
            tags,
        },
        lut,
        source_bit_depth: image.source_bit_depth,
    };
    Ok((out, record))
}

/// Recovers the original image from an enhanced one.
///
/// Integer sources go through the lookup table (exact at integer level);
/// otherwise each sample is inverted by golden-section search.
pub fn invert(enhanced: &PlanarImage, record: &TransformRecord) -> Result<PlanarImage> {
    let map = &record.class_map;
    if enhanced.width() != map.width
        || enhanced.height() != map.height
        || enhanced.channels() != map.channels
    {
        return Err(Error::RecordMismatch(format!(
            "image {}x{}x{} vs class map {}x{}x{}",
            enhanced.width(),
            enhanced.height(),
            enhanced.channels(),
            map.width,
            map.height,
            map.channels
        )));
    }
    let params = &record.params;
    if let Some(lut) = &record.lut {
        if lut.gamma != params.gamma {
            return Err(Error::RecordMismatch(format!(
                "lut gamma {} != params gamma {}",
                lut.gamma, params.gamma
            )));
        }
    }

    let lut_path = record.lut.as_ref().filter(|lut| {
        matches!(record.source_bit_depth, 8 | 16)
            && lut.bit_max == (1u32 << record.source_bit_depth) - 1
    });

    let data: Vec<f64> = if let Some(lut) = lut_path {
        let max = f64::from(lut.bit_max);
        enhanced
            .data()
            .par_iter()
            .zip(map.tags.par_iter())
            .map(|(&v, &branch)| f64::from(lut.invert(v, branch)) / max)
            .collect()
    } else {
        let cfg = GoldenSearchConfig::default();
        enhanced
            .data()
            .par_iter()
            .zip(map.tags.par_iter())
            .map(|(&v, &branch)| {
                let target = (v * params.doc_max).min(params.doc_max);
                invert_golden(target, params, branch, &cfg)
            })
            .collect::<Result<_>>()?
    };

    Ok(PlanarImage::from_raw_unchecked(
        enhanced.width(),
        enhanced.height(),
        enhanced.channels(),
        data,
        record.source_bit_depth,
    ))
}

/// Tags every sample with its branch: ascending iff `x <= d_max`.
pub fn classify_slopes(image: &PlanarImage, gamma: f64) -> Result<SlopeClassMap> {
    let params = DichotomyParams::from_gamma(gamma)?;
    let tags: Vec<Branch> = image
        .data()
        .par_iter()
        .map(|&x| params.branch_of(x))
        .collect();
    Ok(SlopeClassMap {
        width: image.width(),
        height: image.height(),
        channels: image.channels(),
        tags,
    })
}

/// Renders a class map with the usual color code.
///
/// Grayscale sources map ascending to red and descending to blue; RGB
/// sources set each output channel to 1 where that channel ascends, giving
/// white for all-ascending, black for all-descending, and yellow, magenta,
/// or cyan for the mixed cases.
pub fn render_class_map(map: &SlopeClassMap) -> PlanarImage {
    let n = map.width * map.height;
    let mut data = vec![0.0f64; n * 3];
    match map.channels {
        1 => {
            for i in 0..n {
                match map.tags[i] {
                    Branch::Ascending => data[i] = 1.0,
                    Branch::Descending => data[2 * n + i] = 1.0,
                }
            }
        }
        _ => {
            for c in 0..3 {
                for i in 0..n {
                    if map.tags[c * n + i] == Branch::Ascending {
                        data[c * n + i] = 1.0;
                    }
                }
            }
        }
    }
    PlanarImage::from_raw_unchecked(map.width, map.height, 3, data, 8)
}
