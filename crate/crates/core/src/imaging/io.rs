//! PNG/JPEG decode and PNG encode.

use std::io::Cursor;
use std::path::Path;

use image::{codecs::png::PngEncoder, ExtendedColorType, ImageEncoder};

use super::buffer::{Channels, ImageBuffer};
use crate::error::{Error, Result};

/// File extensions accepted when scanning directories.
pub const IMAGE_EXTENSIONS: &[&str] = &["png", "jpg", "jpeg"];

pub fn is_image_path(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
        .unwrap_or(false)
}

/// Decodes PNG or JPEG bytes into an RGB buffer.
pub fn decode(bytes: &[u8]) -> Result<ImageBuffer> {
    let img = image::load_from_memory(bytes)?.to_rgb8();
    let (w, h) = img.dimensions();
    ImageBuffer::from_raw(w as usize, h as usize, Channels::Rgb, img.into_raw())
}

pub fn load(path: impl AsRef<Path>) -> Result<ImageBuffer> {
    let bytes = std::fs::read(path.as_ref())?;
    decode(&bytes)
}

/// Lossless PNG encoding; identical buffers always produce identical bytes.
pub fn encode_png(img: &ImageBuffer) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let color = match img.channels() {
        Channels::Gray => ExtendedColorType::L8,
        Channels::Rgb => ExtendedColorType::Rgb8,
    };
    PngEncoder::new(Cursor::new(&mut out)).write_image(
        img.data(),
        u32::try_from(img.width()).map_err(|_| Error::invalid("image too wide for PNG"))?,
        u32::try_from(img.height()).map_err(|_| Error::invalid("image too tall for PNG"))?,
        color,
    )?;
    Ok(out)
}

pub fn save_png(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, encode_png(img)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn png_round_trip() {
        let img = ImageBuffer::from_fn(13, 7, Channels::Rgb, |x, y, c| (x * 19 + y * 7 + c * 50) as u8)
            .unwrap();
        let bytes = encode_png(&img).unwrap();
        assert_eq!(decode(&bytes).unwrap(), img);
        assert_eq!(encode_png(&img).unwrap(), bytes);
    }

    #[test]
    fn gray_png_decodes_as_rgb() {
        let img = ImageBuffer::from_fn(4, 4, Channels::Gray, |x, _, _| (x * 60) as u8).unwrap();
        let back = decode(&encode_png(&img).unwrap()).unwrap();
        assert_eq!(back, img.to_rgb());
    }

    #[test]
    fn garbage_is_a_codec_error() {
        assert!(matches!(decode(b"not an image"), Err(Error::Codec(_))));
    }
}
