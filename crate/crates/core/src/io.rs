//! PNG/JPEG decoding into the in-memory rasters and PNG encoding back out.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, ImageFormat, RgbImage};

use crate::error::{Error, Result};
use crate::raster::{mask_to_grey, BinaryImage, ColorImage, GreyImage};

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn decode(bytes: &[u8]) -> Result<DynamicImage> {
    Ok(image::load_from_memory(bytes)?)
}

/// Decodes any supported image to RGB. Greyscale input is promoted with
/// equal channels; alpha is dropped.
pub fn decode_color(bytes: &[u8]) -> Result<ColorImage> {
    let rgb = decode(bytes)?.into_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let pixels = rgb.pixels().map(|p| p.0).collect();
    ColorImage::from_vec(w, h, pixels)
}

/// Decodes any supported image to BT.601 greyscale.
pub fn decode_grey(bytes: &[u8]) -> Result<GreyImage> {
    let color = decode_color(bytes)?;
    Ok(crate::raster::to_grey(&color))
}

pub fn read_color(path: impl AsRef<Path>) -> Result<ColorImage> {
    decode_color(&read_file(path.as_ref())?)
}

pub fn read_grey(path: impl AsRef<Path>) -> Result<GreyImage> {
    decode_grey(&read_file(path.as_ref())?)
}

/// Reads a hint image produced by any external provider (for instance a
/// cGAN inference run) at whatever resolution it was saved.
pub fn hint_from_file(path: impl AsRef<Path>) -> Result<ColorImage> {
    read_color(path)
}

pub fn encode_color_png(img: &ColorImage) -> Vec<u8> {
    let (w, h) = img.dimensions();
    let flat: Vec<u8> = img.pixels().iter().flatten().copied().collect();
    let buf = RgbImage::from_raw(w as u32, h as u32, flat).expect("buffer matches dimensions");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    out.into_inner()
}

pub fn encode_grey_png(img: &GreyImage) -> Vec<u8> {
    let (w, h) = img.dimensions();
    let buf = image::GrayImage::from_raw(w as u32, h as u32, img.pixels().to_vec())
        .expect("buffer matches dimensions");
    let mut out = Cursor::new(Vec::new());
    buf.write_to(&mut out, ImageFormat::Png)
        .expect("PNG encoding into memory cannot fail");
    out.into_inner()
}

/// Black ink on white paper.
pub fn encode_mask_png(mask: &BinaryImage) -> Vec<u8> {
    encode_grey_png(&mask_to_grey(mask))
}

pub fn write_color_png(img: &ColorImage, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_color_png(img))
}

pub fn write_grey_png(img: &GreyImage, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_grey_png(img))
}

pub fn write_mask_png(mask: &BinaryImage, path: impl AsRef<Path>) -> Result<()> {
    write_file(path.as_ref(), &encode_mask_png(mask))
}

/// Reads a line drawing and keeps it as grey so the caller can pick the
/// binarization threshold.
pub fn read_lineart(path: impl AsRef<Path>) -> Result<GreyImage> {
    read_grey(path)
}
