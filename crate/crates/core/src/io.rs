//! 8-bit PNG and binary PGM/PPM input and output.
//!
//! Image rows map to the first grid axis. Values are scaled by 255 and
//! rounded half up on output.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use image::codecs::pnm::{PnmEncoder, PnmSubtype, SampleEncoding};
use image::{ColorType, DynamicImage, ExtendedColorType, ImageEncoder, ImageFormat};

use crate::error::{Error, Result};
use crate::grid::ImageGrid;

pub fn to_u8(value: f64) -> u8 {
    (value * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn from_u8(value: u8) -> f64 {
    value as f64 / 255.0
}

/// Converts a decoded image. Grayscale inputs (with or without alpha) give
/// one channel, everything else three; alpha is dropped.
pub fn from_dynamic(img: &DynamicImage) -> Result<ImageGrid> {
    let (width, height) = (img.width(), img.height());
    if width != height {
        return Err(Error::InvalidImage(format!(
            "image is {width}x{height}; the conformal map works on a square domain, so inputs must be square"
        )));
    }
    let size = width as usize;
    let gray = matches!(img.color(), ColorType::L8 | ColorType::L16 | ColorType::La8 | ColorType::La16);
    let (channels, raw) = if gray { (1, img.to_luma8().into_raw()) } else { (3, img.to_rgb8().into_raw()) };
    ImageGrid::from_vec(size, channels, raw.into_iter().map(from_u8).collect())
}

pub fn read_image(path: impl AsRef<Path>) -> Result<ImageGrid> {
    from_dynamic(&image::open(path)?)
}

fn encode_bytes(img: &ImageGrid) -> Result<(Vec<u8>, ExtendedColorType)> {
    let color = match img.channels() {
        1 => ExtendedColorType::L8,
        3 => ExtendedColorType::Rgb8,
        c => return Err(Error::InvalidImage(format!("cannot encode an image with {c} channels"))),
    };
    Ok((img.data().iter().map(|&v| to_u8(v)).collect(), color))
}

/// Writes `img`; the format follows the extension (`png`, `pgm`, `ppm`,
/// `pnm`).
pub fn write_image(path: impl AsRef<Path>, img: &ImageGrid) -> Result<()> {
    let path = path.as_ref();
    let (bytes, color) = encode_bytes(img)?;
    let side = img.size() as u32;
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).unwrap_or_default();
    match ext.as_str() {
        "png" => image::save_buffer_with_format(path, &bytes, side, side, color, ImageFormat::Png)?,
        "pgm" | "ppm" | "pnm" => {
            let subtype = if img.channels() == 1 {
                PnmSubtype::Graymap(SampleEncoding::Binary)
            } else {
                PnmSubtype::Pixmap(SampleEncoding::Binary)
            };
            let writer = BufWriter::new(File::create(path)?);
            PnmEncoder::new(writer).with_subtype(subtype).write_image(&bytes, side, side, color)?;
        }
        other => {
            return Err(Error::InvalidImage(format!("unsupported output extension {other:?} (use png, pgm or ppm)")))
        }
    }
    Ok(())
}

/// Whether `path` has an extension this module reads.
pub fn is_supported(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "pgm" | "ppm" | "pnm"))
        .unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns;

    #[test]
    fn quantization_rounds_half_up() {
        assert_eq!(to_u8(0.0), 0);
        assert_eq!(to_u8(1.0), 255);
        assert_eq!(to_u8(0.5), 128);
        assert_eq!(to_u8(1.5 / 255.0), 2);
        assert_eq!(from_u8(255), 1.0);
    }

    #[test]
    fn png_and_pnm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let gray = patterns::linear_gradient(16, 1);
        let rgb = patterns::parallel_lines(16, 3, 3);
        for (img, name) in [(&gray, "g.png"), (&gray, "g.pgm"), (&rgb, "c.png"), (&rgb, "c.ppm")] {
            let path = dir.path().join(name);
            write_image(&path, img).unwrap();
            let back = read_image(&path).unwrap();
            assert_eq!((back.size(), back.channels()), (img.size(), img.channels()));
            let worst = img.data().iter().zip(back.data()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(worst <= 0.5 / 255.0 + 1e-12, "{name}: {worst}");
        }
    }

    #[test]
    fn rejects_non_square() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wide.png");
        image::GrayImage::new(8, 5).save(&path).unwrap();
        let err = read_image(&path).unwrap_err().to_string();
        assert!(err.contains("square"), "{err}");
    }

    #[test]
    fn rejects_unknown_extension() {
        let dir = tempfile::tempdir().unwrap();
        let img = patterns::linear_gradient(4, 1);
        assert!(write_image(dir.path().join("x.bmp"), &img).is_err());
    }
}
