//! PNG (8/16-bit) and binary PPM/PGM decode/encode.
//!
//! Decoded samples are normalized by the format's maximum value; encoding
//! quantizes with round-to-nearest.

use std::path::Path;

use image::{DynamicImage, ImageBuffer, ImageFormat, Luma, Rgb};

use crate::error::{Error, Result};
use crate::raster::{Image, Plane};

/// Output sample depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    Eight,
    Sixteen,
}

fn codec_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Codec {
        path: path.to_path_buf(),
        reason: e.to_string(),
    }
}

fn format_for(path: &Path) -> Result<ImageFormat> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    match ext.as_str() {
        "png" => Ok(ImageFormat::Png),
        "ppm" | "pgm" | "pnm" => Ok(ImageFormat::Pnm),
        _ => Err(Error::Param(format!(
            "{}: unsupported image extension (expected png, ppm or pgm)",
            path.display()
        ))),
    }
}

pub fn quantize(v: f64, max: f64) -> f64 {
    (v.clamp(0.0, 1.0) * max).round()
}

/// Reads a PNG/PPM/PGM file. Gray inputs are replicated to three channels.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let dynamic = image::open(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => codec_err(path, other),
    })?;
    let (width, height) = (dynamic.width() as usize, dynamic.height() as usize);
    let sixteen = matches!(
        dynamic,
        DynamicImage::ImageLuma16(_)
            | DynamicImage::ImageLumaA16(_)
            | DynamicImage::ImageRgb16(_)
            | DynamicImage::ImageRgba16(_)
    );
    let data: Vec<f64> = if sixteen {
        dynamic
            .to_rgb16()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 65535.0)
            .collect()
    } else {
        dynamic
            .to_rgb8()
            .into_raw()
            .into_iter()
            .map(|v| f64::from(v) / 255.0)
            .collect()
    };
    Image::new(width, height, data)
}

/// Reads only the header to learn the dimensions.
pub fn image_dimensions(path: impl AsRef<Path>) -> Result<(usize, usize)> {
    let path = path.as_ref();
    let (w, h) = image::image_dimensions(path).map_err(|e| match e {
        image::ImageError::IoError(io) => Error::io(path, io),
        other => codec_err(path, other),
    })?;
    Ok((w as usize, h as usize))
}

pub fn write_image(image: &Image, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let format = format_for(path)?;
    let (w, h) = (image.width() as u32, image.height() as u32);
    let dynamic = match depth {
        BitDepth::Eight => {
            let raw = image.data().iter().map(|&v| quantize(v, 255.0) as u8).collect();
            DynamicImage::ImageRgb8(ImageBuffer::<Rgb<u8>, _>::from_raw(w, h, raw).expect("buffer size"))
        }
        BitDepth::Sixteen => {
            let raw = image.data().iter().map(|&v| quantize(v, 65535.0) as u16).collect();
            DynamicImage::ImageRgb16(ImageBuffer::<Rgb<u16>, _>::from_raw(w, h, raw).expect("buffer size"))
        }
    };
    dynamic.save_with_format(path, format).map_err(|e| codec_err(path, e))
}

/// Writes a single-channel map; values are clamped to [0, 1] first.
pub fn write_plane(plane: &Plane, path: impl AsRef<Path>, depth: BitDepth) -> Result<()> {
    let path = path.as_ref();
    let format = format_for(path)?;
    let (w, h) = (plane.width() as u32, plane.height() as u32);
    let dynamic = match depth {
        BitDepth::Eight => {
            let raw = plane.data().iter().map(|&v| quantize(v, 255.0) as u8).collect();
            DynamicImage::ImageLuma8(ImageBuffer::<Luma<u8>, _>::from_raw(w, h, raw).expect("buffer size"))
        }
        BitDepth::Sixteen => {
            let raw = plane.data().iter().map(|&v| quantize(v, 65535.0) as u16).collect();
            DynamicImage::ImageLuma16(ImageBuffer::<Luma<u16>, _>::from_raw(w, h, raw).expect("buffer size"))
        }
    };
    dynamic.save_with_format(path, format).map_err(|e| codec_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Image {
        Image::from_fn(5, 3, |x, y| [x as f64 / 4.0, y as f64 / 2.0, 0.3])
    }

    #[test]
    fn png8_round_trip_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.png");
        let img = sample();
        write_image(&img, &p, BitDepth::Eight).unwrap();
        let back = read_image(&p).unwrap();
        assert_eq!(back.dims(), img.dims());
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn png16_and_ppm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let img = sample();
        let p16 = dir.path().join("a16.png");
        write_image(&img, &p16, BitDepth::Sixteen).unwrap();
        let back = read_image(&p16).unwrap();
        for (a, b) in img.data().iter().zip(back.data()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
        let ppm = dir.path().join("a.ppm");
        write_image(&img, &ppm, BitDepth::Eight).unwrap();
        assert_eq!(read_image(&ppm).unwrap().dims(), (5, 3));
    }

    #[test]
    fn gray_pgm_replicates_channels() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.pgm");
        let plane = Plane::from_fn(3, 2, |x, _| x as f64 / 2.0);
        write_plane(&plane, &p, BitDepth::Eight).unwrap();
        let img = read_image(&p).unwrap();
        let px = img.pixel(2, 1);
        assert_eq!(px, [1.0, 1.0, 1.0]);
        assert_eq!(image_dimensions(&p).unwrap(), (3, 2));
    }

    #[test]
    fn rounding_is_to_nearest() {
        assert_eq!(quantize(0.5 / 255.0 + 1e-9, 255.0), 1.0);
        assert_eq!(quantize(0.5 / 255.0 - 1e-9, 255.0), 0.0);
        assert_eq!(quantize(1.2, 255.0), 255.0);
    }

    #[test]
    fn unknown_extension_is_rejected() {
        let err = write_image(&sample(), "/tmp/x.jpg", BitDepth::Eight).unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }
}
