//! Line-art extraction.
//!
//! Screentones are removed by blurring the page until the fine tone
//! pattern flattens into a mid grey, then keeping only pixels that are
//! clearly darker than their neighbourhood (an adaptive mean threshold),
//! then dropping small isolated ink specks. When a clean line drawing is
//! available it is thresholded directly with [`binarize`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParamError, Result};
use crate::raster::{gaussian_blur, BinaryImage, GreyImage, Raster};
use crate::segment::components::{connected_components, Connectivity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LineartParams {
    pub blur_radius: usize,
    /// Side of the square window the local mean is taken over. Odd, ≥ 3.
    pub adaptive_window: usize,
    /// How far below the local mean a pixel must be to count as ink.
    pub adaptive_offset: u8,
    /// Ink components smaller than this many pixels are erased.
    pub min_speck_area: usize,
}

impl Default for LineartParams {
    fn default() -> Self {
        Self {
            blur_radius: 1,
            adaptive_window: 15,
            adaptive_offset: 10,
            min_speck_area: 10,
        }
    }
}

impl LineartParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.adaptive_window < 3 || self.adaptive_window % 2 == 0 {
            return Err(ParamError {
                field: "adaptive_window",
                value: self.adaptive_window as i64,
                permissible: "odd and >= 3",
            });
        }
        Ok(())
    }
}

/// Extracts edge lines from a (possibly screentoned) monochrome page.
pub fn remove_screentone(img: &GreyImage, params: &LineartParams) -> Result<BinaryImage> {
    params.validate().map_err(|e| Error::param("lineart", e))?;
    let blurred = gaussian_blur(img, params.blur_radius);
    let ink = adaptive_threshold(&blurred, params.adaptive_window, params.adaptive_offset);
    Ok(despeckle(&ink, params.min_speck_area))
}

/// Marks a pixel as ink iff it is darker than the mean of the
/// `window`×`window` neighbourhood (clipped to the image) minus `offset`.
pub fn adaptive_threshold(img: &GreyImage, window: usize, offset: u8) -> BinaryImage {
    let (w, h) = img.dimensions();
    // Summed-area table with a zero row and column in front.
    let stride = w + 1;
    let mut table = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0u64;
        for x in 0..w {
            row_sum += img.get(x, y) as u64;
            table[(y + 1) * stride + x + 1] = table[y * stride + x + 1] + row_sum;
        }
    }
    let half = window / 2;
    let offset = offset as i64;
    Raster::from_fn(w, h, |x, y| {
        let x0 = x.saturating_sub(half);
        let y0 = y.saturating_sub(half);
        let x1 = (x + half + 1).min(w);
        let y1 = (y + half + 1).min(h);
        let sum = table[y1 * stride + x1] + table[y0 * stride + x0]
            - table[y0 * stride + x1]
            - table[y1 * stride + x0];
        let count = ((x1 - x0) * (y1 - y0)) as i64;
        // v < sum / count - offset, kept in integers.
        (img.get(x, y) as i64 + offset) * count < sum as i64
    })
}

/// Thresholds a clean line drawing: ink iff intensity < `threshold`.
pub fn binarize(img: &GreyImage, threshold: u8) -> BinaryImage {
    img.map(|v| v < threshold)
}

/// Clears 8-connected ink components with fewer than `min_area` pixels.
pub fn despeckle(mask: &BinaryImage, min_area: usize) -> BinaryImage {
    if min_area <= 1 {
        return mask.clone();
    }
    let labels = connected_components(mask, Connectivity::Eight);
    let mut out = mask.clone();
    for (px, &label) in out.pixels_mut().iter_mut().zip(labels.labels.pixels()) {
        if label != 0 && labels.areas[label as usize - 1] < min_area {
            *px = false;
        }
    }
    out
}
