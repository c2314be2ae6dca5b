//! Turning a segmentation plus a coarse hint into a flat colorization:
//! per-segment mean color, saturation boost, optional k-means
//! quantization, optional shading from the screentones, and outline
//! compositing.

mod quantize;
mod select;
mod shading;

use crate::error::Result;
use crate::raster::{hsv_to_rgb, rgb_to_hsv, BinaryImage, ColorImage};

pub use quantize::{quantize_colors, quantize_colors_with_report, QuantizeParams, QuantizeReport};
pub use select::{render_palette, select_segment_colors, SegmentPalette};
pub use shading::{apply_shading, shading_subtrahend, ShadeParams};

/// Adds `delta` to the HSV saturation of every chromatic, non-edge pixel,
/// saturating at 255. Hue and value are kept; achromatic pixels (S = 0)
/// and edge pixels are returned untouched. A zero increment is the
/// identity.
pub fn increase_saturation(
    img: &ColorImage,
    delta: u8,
    edge_mask: &BinaryImage,
) -> Result<ColorImage> {
    img.ensure_same_dims(edge_mask, "saturation")?;
    let mut out = img.clone();
    if delta == 0 {
        return Ok(out);
    }
    for (px, &edge) in out.pixels_mut().iter_mut().zip(edge_mask.pixels()) {
        if edge {
            continue;
        }
        let mut hsv = rgb_to_hsv(*px);
        if hsv.s == 0 {
            continue;
        }
        hsv.s = hsv.s.saturating_add(delta);
        *px = hsv_to_rgb(hsv);
    }
    Ok(out)
}

/// Paints ink pixels black.
pub fn composite_lines(img: &ColorImage, lines: &BinaryImage) -> Result<ColorImage> {
    img.ensure_same_dims(lines, "composite")?;
    let mut out = img.clone();
    for (px, &ink) in out.pixels_mut().iter_mut().zip(lines.pixels()) {
        if ink {
            *px = [0, 0, 0];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::Rgb;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hue_diff(a: f64, b: f64) -> f64 {
        let d = (a - b).abs() % 360.0;
        d.min(360.0 - d)
    }

    #[test]
    fn zero_delta_roundtrips() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let img = ColorImage::from_fn(32, 32, |_, _| [rng.random(), rng.random(), rng.random()]);
        let none = BinaryImage::filled(32, 32, false);
        let out = increase_saturation(&img, 0, &none).unwrap();
        for (a, b) in img.pixels().iter().zip(out.pixels()) {
            for c in 0..3 {
                assert!((a[c] as i32 - b[c] as i32).abs() <= 1);
            }
        }
    }

    #[test]
    fn grey_is_skipped() {
        let img = ColorImage::filled(4, 4, [200, 200, 200]);
        let none = BinaryImage::filled(4, 4, false);
        assert_eq!(increase_saturation(&img, 25, &none).unwrap(), img);
    }

    #[test]
    fn edges_are_skipped() {
        let img = ColorImage::filled(4, 4, [200, 100, 100]);
        let all = BinaryImage::filled(4, 4, true);
        assert_eq!(increase_saturation(&img, 25, &all).unwrap(), img);
    }

    #[test]
    fn reddish_pixel_gains_exactly_delta() {
        let img = ColorImage::filled(1, 1, [200, 100, 100]);
        let none = BinaryImage::filled(1, 1, false);
        let before = rgb_to_hsv(img.get(0, 0));
        let out = increase_saturation(&img, 25, &none).unwrap();
        let after = rgb_to_hsv(out.get(0, 0));
        assert_eq!(after.s as i32 - before.s as i32, 25);
        assert!(hue_diff(after.h, before.h) <= 1.0);
        assert_eq!(after.v, before.v);
        assert_eq!(out.get(0, 0), [200, 80, 80]);
    }

    #[test]
    fn saturation_clamps() {
        let img = ColorImage::filled(1, 1, [255, 10, 10]);
        let none = BinaryImage::filled(1, 1, false);
        let out = increase_saturation(&img, 200, &none).unwrap();
        assert_eq!(rgb_to_hsv(out.get(0, 0)).s, 255);
    }

    #[test]
    fn composite_cases() {
        let img = ColorImage::from_fn(8, 8, |x, y| [x as u8 * 20 + 1, y as u8 * 20 + 1, 7]);
        let empty = BinaryImage::filled(8, 8, false);
        assert_eq!(composite_lines(&img, &empty).unwrap(), img);
        let full = BinaryImage::filled(8, 8, true);
        assert_eq!(
            composite_lines(&img, &full).unwrap(),
            ColorImage::filled(8, 8, [0; 3])
        );

        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mask = BinaryImage::from_fn(8, 8, |_, _| rng.random_bool(0.4));
        let out = composite_lines(&img, &mask).unwrap();
        let changed = img
            .pixels()
            .iter()
            .zip(out.pixels())
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(changed, mask.count_ink());
    }

    #[test]
    fn dimension_mismatch() {
        let img = ColorImage::filled(4, 4, [1; 3]);
        let mask = BinaryImage::filled(4, 5, false);
        assert!(composite_lines(&img, &mask).is_err());
        assert!(increase_saturation(&img, 1, &mask).is_err());
    }

    proptest! {
        #[test]
        fn saturation_keeps_hue_and_value(r in 0u8..=255, g in 0u8..=255, b in 0u8..=255, delta in 0u8..=254) {
            let rgb: Rgb = [r, g, b];
            let img = ColorImage::filled(1, 1, rgb);
            let none = BinaryImage::filled(1, 1, false);
            let out = increase_saturation(&img, delta, &none).unwrap().get(0, 0);
            let (before, after) = (rgb_to_hsv(rgb), rgb_to_hsv(out));
            prop_assert!((after.v as i32 - before.v as i32).abs() <= 1);
            // 8-bit channels pin the hue only once the chroma is large
            // enough; below that a one-unit rounding step moves it by more
            // than a degree.
            let chroma = out.iter().max().unwrap() - out.iter().min().unwrap();
            if before.s > 0 && chroma >= 90 {
                prop_assert!(hue_diff(after.h, before.h) <= 1.0, "{:?} -> {:?}", rgb, out);
            }
        }
    }
}
