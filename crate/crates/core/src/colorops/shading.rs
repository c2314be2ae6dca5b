use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::raster::{gaussian_blur, ColorImage, GreyImage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShadeParams {
    pub shade_radius: usize,
}

impl ShadeParams {
    /// Two pixels wider than the screentone-removal blur.
    pub fn for_blur_radius(blur_radius: usize) -> Self {
        Self {
            shade_radius: blur_radius + 2,
        }
    }
}

/// `round((255 - m) / 3)`. The quotient never lands on a half, so this is
/// `(255 - m + 1) / 3` in integers.
#[inline]
pub fn shading_subtrahend(m: u8) -> u8 {
    ((255 - m as u16 + 1) / 3) as u8
}

/// Darkens `color` by a third of the darkness of the blurred monochrome
/// page, channel by channel, clamping at 0.
pub fn apply_shading(
    color: &ColorImage,
    mono: &GreyImage,
    params: &ShadeParams,
) -> Result<ColorImage> {
    color.ensure_same_dims(mono, "shading")?;
    let blurred = gaussian_blur(mono, params.shade_radius);
    let mut out = color.clone();
    for (px, &m) in out.pixels_mut().iter_mut().zip(blurred.pixels()) {
        let sub = shading_subtrahend(m);
        *px = px.map(|c| c.saturating_sub(sub));
    }
    Ok(out)
}
