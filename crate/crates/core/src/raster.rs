//! Raster containers and the pixel-level primitives every stage builds on:
//! Gaussian blur, HSV conversion, greyscale conversion and bilinear
//! resizing.
//!
//! All integer rounding rounds half away from zero.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// An 8-bit RGB triple.
pub type Rgb = [u8; 3];

/// A row-major grid of pixels with at least one row and one column.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Raster<P> {
    width: usize,
    height: usize,
    pixels: Vec<P>,
}

/// RGB working image.
pub type ColorImage = Raster<Rgb>;
/// Single-channel intensity image.
pub type GreyImage = Raster<u8>;
/// Ink mask: `true` marks an edge-line pixel, `false` free paper.
pub type BinaryImage = Raster<bool>;

impl<P: Copy> Raster<P> {
    /// Builds a raster from row-major pixels.
    pub fn from_vec(width: usize, height: usize, pixels: Vec<P>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "{} pixels supplied for a {width}x{height} raster",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// A raster with every pixel set to `value`.
    ///
    /// Panics if either dimension is zero.
    pub fn filled(width: usize, height: usize, value: P) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be non-zero"
        );
        Self {
            width,
            height,
            pixels: vec![value; width * height],
        }
    }

    /// Panics if either dimension is zero.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> P) -> Self {
        assert!(
            width > 0 && height > 0,
            "raster dimensions must be non-zero"
        );
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> P {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: P) {
        self.pixels[y * self.width + x] = value;
    }

    pub fn pixels(&self) -> &[P] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [P] {
        &mut self.pixels
    }

    pub fn into_pixels(self) -> Vec<P> {
        self.pixels
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, P> {
        self.pixels.chunks_exact(self.width)
    }

    /// Applies `f` to every pixel, keeping the dimensions.
    pub fn map<Q: Copy>(&self, f: impl Fn(P) -> Q) -> Raster<Q> {
        Raster {
            width: self.width,
            height: self.height,
            pixels: self.pixels.iter().map(|&p| f(p)).collect(),
        }
    }

    pub(crate) fn ensure_same_dims<Q: Copy>(
        &self,
        other: &Raster<Q>,
        stage: &'static str,
    ) -> Result<()> {
        if self.dimensions() != other.dimensions() {
            return Err(Error::DimensionMismatch {
                stage,
                expected: self.dimensions(),
                actual: other.dimensions(),
            });
        }
        Ok(())
    }
}

impl BinaryImage {
    /// Number of ink pixels.
    pub fn count_ink(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    /// Complement of the mask.
    pub fn invert(&self) -> BinaryImage {
        self.map(|p| !p)
    }
}

/// Rounds half away from zero and saturates into `u8`.
#[inline]
pub(crate) fn round_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

// ---------------------------------------------------------------------------
// Gaussian blur

/// Pixel types the blur can filter channel by channel.
pub trait Channels: Copy + Send + Sync {
    const COUNT: usize;
    fn channel(&self, i: usize) -> u8;
    fn from_channels(values: &[u8]) -> Self;
}

impl Channels for u8 {
    const COUNT: usize = 1;

    fn channel(&self, _: usize) -> u8 {
        *self
    }

    fn from_channels(values: &[u8]) -> Self {
        values[0]
    }
}

impl Channels for Rgb {
    const COUNT: usize = 3;

    fn channel(&self, i: usize) -> u8 {
        self[i]
    }

    fn from_channels(values: &[u8]) -> Self {
        [values[0], values[1], values[2]]
    }
}

/// Normalized 1-D Gaussian taps for offsets `-radius..=radius`.
///
/// Sigma is `max(radius / 2, 0.5)`.
pub fn gaussian_kernel(radius: usize) -> Vec<f64> {
    let sigma = (radius as f64 / 2.0).max(0.5);
    let r = radius as i64;
    let taps: Vec<f64> = (-r..=r)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = taps.iter().sum();
    taps.into_iter().map(|t| t / sum).collect()
}

/// Separable Gaussian blur with half-width `radius` and edge replication.
///
/// Radius 0 returns the input unchanged. Channels are filtered
/// independently and the result is rounded once, after both passes.
pub fn gaussian_blur<P: Channels>(img: &Raster<P>, radius: usize) -> Raster<P> {
    if radius == 0 {
        return img.clone();
    }
    let kernel = gaussian_kernel(radius);
    let (w, h) = img.dimensions();
    let r = radius as isize;
    let n = P::COUNT;

    // Horizontal pass into a float buffer, `n` interleaved channels per pixel.
    let mut horizontal = vec![0f64; w * h * n];
    horizontal
        .par_chunks_mut(w * n)
        .zip(img.pixels.par_chunks(w))
        .for_each(|(out, row)| {
            for x in 0..w {
                for c in 0..n {
                    let mut acc = 0.0;
                    for (k, weight) in kernel.iter().enumerate() {
                        let sx = (x as isize + k as isize - r).clamp(0, w as isize - 1) as usize;
                        acc += weight * row[sx].channel(c) as f64;
                    }
                    out[x * n + c] = acc;
                }
            }
        });

    let mut pixels = vec![P::from_channels(&[0; 3][..n]); w * h];
    pixels.par_chunks_mut(w).enumerate().for_each(|(y, out)| {
        let mut values = [0u8; 3];
        for (x, px) in out.iter_mut().enumerate() {
            for (c, value) in values.iter_mut().enumerate().take(n) {
                let mut acc = 0.0;
                for (k, weight) in kernel.iter().enumerate() {
                    let sy = (y as isize + k as isize - r).clamp(0, h as isize - 1) as usize;
                    acc += weight * horizontal[(sy * w + x) * n + c];
                }
                *value = round_u8(acc);
            }
            *px = P::from_channels(&values[..n]);
        }
    });
    Raster {
        width: w,
        height: h,
        pixels,
    }
}

// ---------------------------------------------------------------------------
// Color spaces

/// Hexcone HSV with hue in degrees and saturation/value scaled to 0..=255.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvTriple {
    /// Degrees in `[0, 360)`; 0 for achromatic colors.
    pub h: f64,
    pub s: u8,
    pub v: u8,
}

pub fn rgb_to_hsv([r, g, b]: Rgb) -> HsvTriple {
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = (max - min) as f64;
    if max == 0 || delta == 0.0 {
        return HsvTriple {
            h: 0.0,
            s: 0,
            v: max,
        };
    }
    let s = round_u8(delta * 255.0 / max as f64);
    let (rf, gf, bf) = (r as f64, g as f64, b as f64);
    let sector = if max == r {
        ((gf - bf) / delta).rem_euclid(6.0)
    } else if max == g {
        (bf - rf) / delta + 2.0
    } else {
        (rf - gf) / delta + 4.0
    };
    let mut h = sector * 60.0;
    if h >= 360.0 {
        h -= 360.0;
    }
    HsvTriple { h, s, v: max }
}

pub fn hsv_to_rgb(hsv: HsvTriple) -> Rgb {
    let v = hsv.v as f64;
    if hsv.s == 0 {
        return [hsv.v; 3];
    }
    let s = hsv.s as f64 / 255.0;
    let h = hsv.h.rem_euclid(360.0) / 60.0;
    let chroma = v * s;
    let x = chroma * (1.0 - ((h % 2.0) - 1.0).abs());
    let m = v - chroma;
    let (r, g, b) = match h as u32 {
        0 => (chroma, x, 0.0),
        1 => (x, chroma, 0.0),
        2 => (0.0, chroma, x),
        3 => (0.0, x, chroma),
        4 => (x, 0.0, chroma),
        _ => (chroma, 0.0, x),
    };
    [round_u8(r + m), round_u8(g + m), round_u8(b + m)]
}

/// BT.601 luma, rounded.
#[inline]
pub fn luminance([r, g, b]: Rgb) -> u8 {
    // Exact integer form of round(0.299 r + 0.587 g + 0.114 b).
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

pub fn to_grey(img: &ColorImage) -> GreyImage {
    img.map(luminance)
}

/// Promotes a grey image to RGB with equal channels.
pub fn grey_to_color(img: &GreyImage) -> ColorImage {
    img.map(|v| [v; 3])
}

/// Black ink on white paper.
pub fn mask_to_grey(mask: &BinaryImage) -> GreyImage {
    mask.map(|ink| if ink { 0 } else { 255 })
}

// ---------------------------------------------------------------------------
// Resizing

/// Bilinear resize with half-pixel-centered sampling.
///
/// Same-size requests return an exact copy. Panics if a target dimension
/// is zero.
pub fn resize_bilinear(img: &ColorImage, new_w: usize, new_h: usize) -> ColorImage {
    assert!(new_w > 0 && new_h > 0, "resize target must be non-zero");
    if img.dimensions() == (new_w, new_h) {
        return img.clone();
    }
    let (w, h) = img.dimensions();
    let taps = |dst: usize, src_len: usize, dst_len: usize| {
        let pos = (dst as f64 + 0.5) * src_len as f64 / dst_len as f64 - 0.5;
        let pos = pos.clamp(0.0, (src_len - 1) as f64);
        let lo = pos.floor() as usize;
        let hi = (lo + 1).min(src_len - 1);
        (lo, hi, pos - lo as f64)
    };
    let xs: Vec<_> = (0..new_w).map(|x| taps(x, w, new_w)).collect();
    let ys: Vec<_> = (0..new_h).map(|y| taps(y, h, new_h)).collect();

    let mut pixels = vec![[0u8; 3]; new_w * new_h];
    pixels
        .par_chunks_mut(new_w)
        .enumerate()
        .for_each(|(y, row)| {
            let (y0, y1, ty) = ys[y];
            for (x, px) in row.iter_mut().enumerate() {
                let (x0, x1, tx) = xs[x];
                for c in 0..3 {
                    let p00 = img.get(x0, y0)[c] as f64;
                    let p10 = img.get(x1, y0)[c] as f64;
                    let p01 = img.get(x0, y1)[c] as f64;
                    let p11 = img.get(x1, y1)[c] as f64;
                    let top = p00 + (p10 - p00) * tx;
                    let bottom = p01 + (p11 - p01) * tx;
                    px[c] = round_u8(top + (bottom - top) * ty);
                }
            }
        });
    Raster {
        width: new_w,
        height: new_h,
        pixels,
    }
}
