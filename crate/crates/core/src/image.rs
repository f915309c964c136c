//! Image containers: normalized planar floats, integer rasters, and codecs.
//!
//! [`PlanarImage`] holds real samples in `[0, 1]` in channel-planar layout
//! (plane after plane, each row-major), which is the domain of every
//! transform in the crate. [`Raster`] is its quantized integer counterpart
//! used by the metrics and the file formats.

use std::path::Path;

use crate::error::{Error, Result};

/// Normalized real-valued image, one or three channels, channel-planar.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    channels: usize,
    /// Bit depth of the integer source this image came from (8 or 16);
    /// synthetic images default to 8.
    pub source_bit_depth: u8,
    data: Vec<f64>,
}

impl PlanarImage {
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
        source_bit_depth: u8,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Domain("image dimensions must be positive".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(Error::Domain(format!(
                "channels must be 1 or 3, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::GeometryMismatch(format!(
                "data length {} != {width}x{height}x{channels}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("sample {bad} outside [0, 1]")));
        }
        if source_bit_depth != 8 && source_bit_depth != 16 {
            return Err(Error::Domain(format!(
                "source bit depth must be 8 or 16, got {source_bit_depth}"
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            source_bit_depth,
            data,
        })
    }

    /// Constant-valued image, handy in tests and kernels.
    pub fn constant(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Self::new(width, height, channels, vec![value; width * height * channels], 8)
    }

    /// Builds each plane from a closure of `(x, y, channel)`.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: usize,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height * channels);
        for c in 0..channels {
            for y in 0..height {
                for x in 0..width {
                    data.push(f(x, y, c));
                }
            }
        }
        Self::new(width, height, channels, data, 8)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn plane(&self, c: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn sample(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    /// Luminance conversion with the broadcast weights 0.299/0.587/0.114.
    pub fn to_grayscale(&self) -> Result<Self> {
        if self.channels == 1 {
            return Err(Error::AlreadyGray);
        }
        let n = self.width * self.height;
        let (r, g, b) = (self.plane(0), self.plane(1), self.plane(2));
        let data: Vec<f64> = (0..n)
            .map(|i| (0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]).clamp(0.0, 1.0))
            .collect();
        Self::new(self.width, self.height, 1, data, self.source_bit_depth)
    }

    pub(crate) fn from_raw_unchecked(
        width: usize,
        height: usize,
        channels: usize,
        data: Vec<f64>,
        source_bit_depth: u8,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            source_bit_depth,
            data,
        }
    }
}

/// Integer raster at 8 or 16 bits, same planar layout as [`PlanarImage`].
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub bit_depth: u8,
    pub data: Vec<u16>,
}

impl Raster {
    pub fn max_level(&self) -> u16 {
        if self.bit_depth == 8 {
            255
        } else {
            u16::MAX
        }
    }

    pub fn plane(&self, c: usize) -> &[u16] {
        let n = self.width * self.height;
        &self.data[c * n..(c + 1) * n]
    }

    pub fn same_geometry(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.channels == other.channels
            && self.bit_depth == other.bit_depth
    }
}

/// Rounds samples half-up onto `2^bits - 1` levels.
pub fn quantize(image: &PlanarImage, bit_depth: u8) -> Raster {
    assert!(bit_depth == 8 || bit_depth == 16, "bit depth must be 8 or 16");
    let max = if bit_depth == 8 { 255.0 } else { 65535.0 };
    Raster {
        width: image.width,
        height: image.height,
        channels: image.channels,
        bit_depth,
        data: image.data.iter().map(|&v| (v * max).round() as u16).collect(),
    }
}

/// Maps levels back onto `[0, 1]` by dividing by `2^bits - 1`.
pub fn dequantize(raster: &Raster) -> PlanarImage {
    let max = f64::from(raster.max_level());
    PlanarImage::from_raw_unchecked(
        raster.width,
        raster.height,
        raster.channels,
        raster.data.iter().map(|&v| f64::from(v) / max).collect(),
        raster.bit_depth,
    )
}

/// PNG (8/16-bit) and JPEG (8-bit) codecs on top of the `image` crate.
pub mod io {
    use super::*;
    use image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb};

    /// Loads a PNG or JPEG file into a normalized planar image.
    pub fn read_image(path: &Path) -> Result<PlanarImage> {
        let dynimg = image::open(path)?;
        Ok(from_dynamic(dynimg))
    }

    /// Decodes from an in-memory buffer (format sniffed from content).
    pub fn decode_image(bytes: &[u8]) -> Result<PlanarImage> {
        let dynimg = image::load_from_memory(bytes)?;
        Ok(from_dynamic(dynimg))
    }

    fn from_dynamic(dynimg: DynamicImage) -> PlanarImage {
        use image::DynamicImage::*;
        match dynimg {
            ImageLuma8(buf) => planar_from_interleaved(
                buf.width(),
                buf.height(),
                1,
                8,
                buf.as_raw().iter().map(|&v| f64::from(v) / 255.0),
            ),
            ImageLuma16(buf) => planar_from_interleaved(
                buf.width(),
                buf.height(),
                1,
                16,
                buf.as_raw().iter().map(|&v| f64::from(v) / 65535.0),
            ),
            ImageRgb16(buf) => planar_from_interleaved(
                buf.width(),
                buf.height(),
                3,
                16,
                buf.as_raw().iter().map(|&v| f64::from(v) / 65535.0),
            ),
            ImageLumaA16(_) | ImageRgba16(_) => {
                let rgb = dynimg.to_rgb16();
                planar_from_interleaved(
                    rgb.width(),
                    rgb.height(),
                    3,
                    16,
                    rgb.as_raw().iter().map(|&v| f64::from(v) / 65535.0),
                )
            }
            other => {
                let rgb = other.to_rgb8();
                planar_from_interleaved(
                    rgb.width(),
                    rgb.height(),
                    3,
                    8,
                    rgb.as_raw().iter().map(|&v| f64::from(v) / 255.0),
                )
            }
        }
    }

    fn planar_from_interleaved(
        width: u32,
        height: u32,
        channels: usize,
        depth: u8,
        samples: impl Iterator<Item = f64>,
    ) -> PlanarImage {
        let (w, h) = (width as usize, height as usize);
        let n = w * h;
        let mut data = vec![0.0; n * channels];
        for (i, v) in samples.enumerate() {
            let (pixel, c) = (i / channels, i % channels);
            data[c * n + pixel] = v.clamp(0.0, 1.0);
        }
        PlanarImage::from_raw_unchecked(w, h, channels, data, depth)
    }

    /// Encodes to PNG bytes at the requested bit depth.
    pub fn encode_png(image: &PlanarImage, bit_depth: u8) -> Result<Vec<u8>> {
        let raster = quantize(image, bit_depth);
        let mut out = std::io::Cursor::new(Vec::new());
        let w = raster.width as u32;
        let h = raster.height as u32;
        match (raster.channels, bit_depth) {
            (1, 8) => ImageBuffer::<Luma<u8>, _>::from_raw(w, h, interleave8(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Png)?,
            (3, 8) => ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, interleave8(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Png)?,
            (1, 16) => ImageBuffer::<Luma<u16>, _>::from_raw(w, h, interleave16(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Png)?,
            (3, 16) => ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, interleave16(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Png)?,
            _ => unreachable!("validated channel count"),
        }
        Ok(out.into_inner())
    }

    /// Encodes to 8-bit JPEG bytes.
    pub fn encode_jpeg(image: &PlanarImage) -> Result<Vec<u8>> {
        let raster = quantize(image, 8);
        let mut out = std::io::Cursor::new(Vec::new());
        let w = raster.width as u32;
        let h = raster.height as u32;
        match raster.channels {
            1 => ImageBuffer::<Luma<u8>, _>::from_raw(w, h, interleave8(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Jpeg)?,
            _ => ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, interleave8(&raster))
                .expect("raster geometry")
                .write_to(&mut out, ImageFormat::Jpeg)?,
        }
        Ok(out.into_inner())
    }

    /// Writes PNG or JPEG depending on the file extension.
    pub fn write_image(path: &Path, image: &PlanarImage, bit_depth: u8) -> Result<()> {
        let bytes = encode_for_path(path, image, bit_depth)?;
        std::fs::write(path, bytes)?;
        Ok(())
    }

    /// Chooses the codec from the extension and returns encoded bytes.
    pub fn encode_for_path(path: &Path, image: &PlanarImage, bit_depth: u8) -> Result<Vec<u8>> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .unwrap_or("png")
            .to_ascii_lowercase();
        match ext.as_str() {
            "jpg" | "jpeg" => {
                if bit_depth != 8 {
                    return Err(Error::Domain("JPEG output is 8-bit only".into()));
                }
                encode_jpeg(image)
            }
            _ => encode_png(image, bit_depth),
        }
    }

    fn interleave8(raster: &Raster) -> Vec<u8> {
        let n = raster.width * raster.height;
        let mut out = vec![0u8; n * raster.channels];
        for c in 0..raster.channels {
            let plane = raster.plane(c);
            for (pixel, &v) in plane.iter().enumerate() {
                out[pixel * raster.channels + c] = v as u8;
            }
        }
        out
    }

    fn interleave16(raster: &Raster) -> Vec<u16> {
        let n = raster.width * raster.height;
        let mut out = vec![0u16; n * raster.channels];
        for c in 0..raster.channels {
            let plane = raster.plane(c);
            for (pixel, &v) in plane.iter().enumerate() {
                out[pixel * raster.channels + c] = v;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_geometry_and_range() {
        assert!(PlanarImage::new(2, 2, 1, vec![0.0; 3], 8).is_err());
        assert!(PlanarImage::new(2, 2, 2, vec![0.0; 8], 8).is_err());
        assert!(PlanarImage::new(2, 2, 1, vec![0.0, 0.5, 1.0, 1.5], 8).is_err());
        assert!(PlanarImage::new(2, 2, 1, vec![0.0; 4], 8).is_ok());
    }

    #[test]
    fn grayscale_weights() {
        let img = PlanarImage::from_fn(1, 1, 3, |_, _, c| if c == 0 { 1.0 } else { 0.0 }).unwrap();
        assert!((img.to_grayscale().unwrap().sample(0, 0, 0) - 0.299).abs() < 1e-12);
        let white = PlanarImage::constant(1, 1, 3, 1.0).unwrap();
        assert!((white.to_grayscale().unwrap().sample(0, 0, 0) - 1.0).abs() < 1e-12);
        let gray = PlanarImage::constant(2, 2, 3, 0.2).unwrap();
        assert!((gray.to_grayscale().unwrap().sample(0, 0, 0) - 0.2).abs() < 1e-12);
        let already = PlanarImage::constant(2, 2, 1, 0.2).unwrap();
        assert!(matches!(already.to_grayscale(), Err(Error::AlreadyGray)));
    }

    #[test]
    fn quantize_half_up() {
        let img = PlanarImage::new(3, 1, 1, vec![0.25, 1.0, 0.5], 8).unwrap();
        let r = quantize(&img, 8);
        assert_eq!(r.data, vec![64, 255, 128]);
        let r16 = quantize(&img, 16);
        assert_eq!(r16.data[1], 65535);
    }

    #[test]
    fn quantize_dequantize_round_trip_is_exact_on_levels() {
        let raster = Raster {
            width: 16,
            height: 16,
            channels: 1,
            bit_depth: 8,
            data: (0..256).map(|v| v as u16).collect(),
        };
        let back = quantize(&dequantize(&raster), 8);
        assert_eq!(raster.data, back.data);
    }

    #[test]
    fn jpeg_decodes_near_the_original() {
        let img = PlanarImage::from_fn(32, 24, 3, |x, y, _| {
            0.2 + 0.6 * ((x + y) as f64 / 54.0)
        })
        .unwrap();
        let bytes = io::encode_jpeg(&img).unwrap();
        let back = io::decode_image(&bytes).unwrap();
        assert!(back.same_geometry(&img));
        assert_eq!(back.source_bit_depth, 8);
        let worst = img
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 0.05, "lossy but close, worst {worst}");
    }

    #[test]
    fn png_round_trip_both_depths() {
        let img = PlanarImage::from_fn(9, 7, 3, |x, y, c| {
            ((x * 31 + y * 17 + c * 97) % 256) as f64 / 255.0
        })
        .unwrap();
        for depth in [8u8, 16] {
            let bytes = io::encode_png(&img, depth).unwrap();
            let back = io::decode_image(&bytes).unwrap();
            assert_eq!(back.source_bit_depth, depth);
            assert!(back.same_geometry(&img));
            let worst = img
                .data()
                .iter()
                .zip(back.data())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(worst <= 0.5 / 255.0, "depth {depth}: worst {worst}");
        }
    }
}
