//! User-drawn gap-closing strokes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::BinaryImage;

fn default_width() -> u32 {
    2
}

/// A polyline in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stroke {
    #[serde(default = "default_width")]
    pub width: u32,
    pub points: Vec<[i64; 2]>,
}

impl Stroke {
    pub fn new(width: u32, points: Vec<[i64; 2]>) -> Self {
        Self { width, points }
    }
}

/// Serialized as a bare JSON list of `{width, points: [[x, y], ...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StrokeSet {
    pub strokes: Vec<Stroke>,
}

impl StrokeSet {
    pub fn is_empty(&self) -> bool {
        self.strokes.is_empty()
    }

    pub fn extend(&mut self, other: StrokeSet) {
        self.strokes.extend(other.strokes);
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            what: "strokes",
            source,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("strokes always serialize")
    }

    /// Fails on the first point outside a `width`×`height` image or a
    /// zero stroke width.
    pub fn check_bounds(&self, width: usize, height: usize) -> Result<()> {
        for stroke in &self.strokes {
            if stroke.width == 0 {
                return Err(Error::StrokeWidth);
            }
            for &[x, y] in &stroke.points {
                if x < 0 || y < 0 || x >= width as i64 || y >= height as i64 {
                    return Err(Error::StrokeOutOfBounds {
                        x,
                        y,
                        width,
                        height,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Rasterizes every stroke into the ink mask.
///
/// Segments are drawn with Bresenham's algorithm and each drawn pixel is
/// widened to a `width`-sided square centred on it (offsets
/// `-(width-1)/2 ..= width/2`), clipped to the image.
pub fn merge_strokes(lines: &BinaryImage, strokes: &StrokeSet) -> Result<BinaryImage> {
    let (w, h) = lines.dimensions();
    strokes.check_bounds(w, h)?;
    let mut out = lines.clone();
    for stroke in &strokes.strokes {
        let lo = (stroke.width as i64 - 1) / 2;
        let hi = stroke.width as i64 / 2;
        let mut stamp = |x: i64, y: i64| {
            for yy in (y - lo).max(0)..=(y + hi).min(h as i64 - 1) {
                for xx in (x - lo).max(0)..=(x + hi).min(w as i64 - 1) {
                    out.set(xx as usize, yy as usize, true);
                }
            }
        };
        match stroke.points.as_slice() {
            [] => {}
            [[x, y]] => stamp(*x, *y),
            points => {
                for pair in points.windows(2) {
                    bresenham(pair[0], pair[1], &mut stamp);
                }
            }
        }
    }
    Ok(out)
}

fn bresenham([x0, y0]: [i64; 2], [x1, y1]: [i64; 2], plot: &mut impl FnMut(i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    let (mut x, mut y) = (x0, y0);
    loop {
        plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segment::{trapped_ball_segment, BallSchedule};

    #[test]
    fn empty_set_is_identity() {
        let lines = BinaryImage::from_fn(9, 9, |x, y| x == y);
        assert_eq!(merge_strokes(&lines, &StrokeSet::default()).unwrap(), lines);
    }

    #[test]
    fn horizontal_stroke_inks_its_pixels() {
        let lines = BinaryImage::filled(10, 5, false);
        let strokes = StrokeSet {
            strokes: vec![Stroke::new(1, vec![[2, 3], [7, 3]])],
        };
        let merged = merge_strokes(&lines, &strokes).unwrap();
        let expected = BinaryImage::from_fn(10, 5, |x, y| y == 3 && (2..=7).contains(&x));
        assert_eq!(merged, expected);
    }

    #[test]
    fn width_two_covers_square() {
        let lines = BinaryImage::filled(6, 6, false);
        let strokes = StrokeSet {
            strokes: vec![Stroke::new(2, vec![[2, 2]])],
        };
        let merged = merge_strokes(&lines, &strokes).unwrap();
        let expected =
            BinaryImage::from_fn(6, 6, |x, y| (2..4).contains(&x) && (2..4).contains(&y));
        assert_eq!(merged, expected);
    }

    #[test]
    fn diagonal_stroke_is_connected() {
        let lines = BinaryImage::filled(20, 20, false);
        let strokes = StrokeSet {
            strokes: vec![Stroke::new(1, vec![[1, 2], [15, 9]])],
        };
        let merged = merge_strokes(&lines, &strokes).unwrap();
        let cc = crate::segment::connected_components(&merged, crate::segment::Connectivity::Eight);
        assert_eq!(cc.count(), 1);
        assert!(merged.get(1, 2) && merged.get(15, 9));
    }

    #[test]
    fn out_of_bounds_rejected() {
        let lines = BinaryImage::filled(10, 10, false);
        for point in [[-1, 0], [10, 3], [3, 10]] {
            let strokes = StrokeSet {
                strokes: vec![Stroke::new(1, vec![[0, 0], point])],
            };
            assert!(matches!(
                merge_strokes(&lines, &strokes),
                Err(Error::StrokeOutOfBounds { .. })
            ));
        }
        let zero = StrokeSet {
            strokes: vec![Stroke::new(0, vec![[0, 0]])],
        };
        assert!(matches!(
            merge_strokes(&lines, &zero),
            Err(Error::StrokeWidth)
        ));
    }

    #[test]
    fn json_shape() {
        let parsed = StrokeSet::from_json(
            r#"[{"width": 3, "points": [[1, 2], [3, 4]]}, {"points": [[0, 0]]}]"#,
        )
        .unwrap();
        assert_eq!(parsed.strokes[0], Stroke::new(3, vec![[1, 2], [3, 4]]));
        assert_eq!(parsed.strokes[1].width, 2);
        assert_eq!(StrokeSet::from_json(&parsed.to_json()).unwrap(), parsed);
    }

    #[test]
    fn bridging_stroke_splits_leaking_region() {
        // Rooms joined through a 4-pixel gap that a 4-pixel ball passes.
        let (w, h) = (64, 32);
        let lines = BinaryImage::from_fn(w, h, |x, y| {
            let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let wall = (31..33).contains(&x) && !(14..18).contains(&y);
            border || wall
        });
        let ball = BallSchedule::new(4).unwrap();
        let before = trapped_ball_segment(&lines, ball).unwrap();
        assert_eq!(before.label(5, 5), before.label(50, 5));

        let strokes = StrokeSet {
            strokes: vec![Stroke::new(2, vec![[31, 13], [31, 18]])],
        };
        let after = trapped_ball_segment(&merge_strokes(&lines, &strokes).unwrap(), ball).unwrap();
        assert_eq!(after.segment_count(), 2);
        assert_ne!(after.label(5, 5), after.label(50, 5));
        assert_eq!(before.segment_count(), 1);
    }
}
