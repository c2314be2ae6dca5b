use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::raster::{ColorImage, Rgb};
use crate::segment::SegmentMap;

/// One color per segment, indexed by segment id.
///
/// JSON form is an object from segment id to `#rrggbb`, which can be
/// hand-edited and fed back through [`render_palette`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentPalette {
    colors: Vec<Rgb>,
}

impl SegmentPalette {
    pub fn get(&self, id: u32) -> Option<Rgb> {
        id.checked_sub(1)
            .and_then(|i| self.colors.get(i as usize).copied())
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// `(id, color)` pairs in id order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, Rgb)> + '_ {
        self.colors
            .iter()
            .enumerate()
            .map(|(i, &c)| (i as u32 + 1, c))
    }

    pub fn to_json(&self) -> String {
        let map: BTreeMap<u32, String> = self
            .iter()
            .map(|(id, [r, g, b])| (id, format!("#{r:02x}{g:02x}{b:02x}")))
            .collect();
        serde_json::to_string_pretty(&map).expect("palette always serializes")
    }

    /// Parses the JSON form; ids must be exactly `1..=n`.
    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<u32, String> =
            serde_json::from_str(text).map_err(|source| Error::Json {
                what: "palette",
                source,
            })?;
        let mut colors = Vec::with_capacity(map.len());
        for (expected, (id, hex)) in (1u32..).zip(&map) {
            if *id != expected {
                return Err(Error::Sidecar(format!(
                    "palette is missing segment {expected}"
                )));
            }
            colors.push(parse_hex(hex).ok_or_else(|| {
                Error::Sidecar(format!("segment {id}: {hex:?} is not a #rrggbb color"))
            })?);
        }
        Ok(Self { colors })
    }
}

fn parse_hex(text: &str) -> Option<Rgb> {
    let digits = text.strip_prefix('#')?;
    if digits.len() != 6 || !digits.is_ascii() {
        return None;
    }
    let channel = |i: usize| u8::from_str_radix(&digits[i..i + 2], 16).ok();
    Some([channel(0)?, channel(2)?, channel(4)?])
}

/// Gives each segment the channel-wise mean of the hint pixels it covers
/// (rounded half away from zero) and paints the result; ink is black.
///
/// The hint must already be at the segmentation's resolution.
pub fn select_segment_colors(
    seg: &SegmentMap,
    hint: &ColorImage,
) -> Result<(ColorImage, SegmentPalette)> {
    seg.labels().ensure_same_dims(hint, "selection")?;
    let mut sums = vec![[0u64; 3]; seg.segment_count()];
    let mut counts = vec![0u64; seg.segment_count()];
    for (&label, px) in seg.labels().pixels().iter().zip(hint.pixels()) {
        if label == 0 {
            continue;
        }
        let i = label as usize - 1;
        for c in 0..3 {
            sums[i][c] += px[c] as u64;
        }
        counts[i] += 1;
    }
    let colors = sums
        .iter()
        .zip(&counts)
        .map(|(sum, &n)| {
            // floor(s / n + 1/2) in integers.
            let mean = |s: u64| ((2 * s + n) / (2 * n)) as u8;
            [mean(sum[0]), mean(sum[1]), mean(sum[2])]
        })
        .collect();
    let palette = SegmentPalette { colors };
    let painted = render_palette(seg, &palette)?;
    Ok((painted, palette))
}

/// Paints every segment its palette color and ink black.
pub fn render_palette(seg: &SegmentMap, palette: &SegmentPalette) -> Result<ColorImage> {
    if palette.len() != seg.segment_count() {
        return Err(Error::Sidecar(format!(
            "palette has {} colors for {} segments",
            palette.len(),
            seg.segment_count()
        )));
    }
    Ok(seg
        .labels()
        .map(|label| palette.get(label).unwrap_or([0, 0, 0])))
}
