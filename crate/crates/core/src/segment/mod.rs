//! Trapped-ball segmentation of line art.
//!
//! A square "ball" is slid through the free (non-ink) space; everything a
//! ball of a given diameter can reach without crossing ink becomes one
//! segment, so gaps in the outlines narrower than the ball do not join
//! regions. Passes run from the starting diameter down to 2, after which
//! the existing segments are grown into every still-unassigned pixel they
//! can reach, and whatever is left over is labelled with a 1-pixel ball.

pub mod components;
pub mod morph;
pub mod sidecar;
mod strokes;
mod trapped_ball;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParamError, Result};
use crate::raster::Raster;

pub use components::{connected_components, Components, Connectivity};
pub use morph::{dilate_anchored, erode, geodesic_dilate};
pub use strokes::{merge_strokes, Stroke, StrokeSet};
pub use trapped_ball::{trapped_ball_segment, trapped_ball_segment_traced, PhaseCounts};

/// Inclusive pixel bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x0: usize,
    pub y0: usize,
    pub x1: usize,
    pub y1: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRecord {
    pub id: u32,
    pub pixel_count: usize,
    pub bbox: BoundingBox,
}

/// Per-pixel segment labels: 0 on ink, `1..=n` on free pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentMap {
    labels: Raster<u32>,
    segments: Vec<SegmentRecord>,
}

impl SegmentMap {
    /// Wraps a label grid whose non-zero labels are exactly `1..=n`.
    pub fn from_labels(labels: Raster<u32>) -> Result<Self> {
        let segments = stats_of(&labels);
        for (i, record) in segments.iter().enumerate() {
            if record.id != i as u32 + 1 || record.pixel_count == 0 {
                return Err(Error::Sidecar(format!(
                    "segment labels must be contiguous from 1, label {} missing",
                    i + 1
                )));
            }
        }
        Ok(Self { labels, segments })
    }

    pub fn labels(&self) -> &Raster<u32> {
        &self.labels
    }

    pub fn segments(&self) -> &[SegmentRecord] {
        &self.segments
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn width(&self) -> usize {
        self.labels.width()
    }

    pub fn height(&self) -> usize {
        self.labels.height()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        self.labels.dimensions()
    }

    #[inline]
    pub fn label(&self, x: usize, y: usize) -> u32 {
        self.labels.get(x, y)
    }
}

/// Recounts pixel totals and bounding boxes from the label grid.
pub fn segment_stats(map: &SegmentMap) -> Vec<SegmentRecord> {
    stats_of(&map.labels)
}

fn stats_of(labels: &Raster<u32>) -> Vec<SegmentRecord> {
    let max = labels.pixels().iter().copied().max().unwrap_or(0) as usize;
    let mut records: Vec<SegmentRecord> = (1..=max as u32)
        .map(|id| SegmentRecord {
            id,
            pixel_count: 0,
            bbox: BoundingBox {
                x0: usize::MAX,
                y0: usize::MAX,
                x1: 0,
                y1: 0,
            },
        })
        .collect();
    for (y, row) in labels.rows().enumerate() {
        for (x, &label) in row.iter().enumerate() {
            if label == 0 {
                continue;
            }
            let r = &mut records[label as usize - 1];
            r.pixel_count += 1;
            r.bbox.x0 = r.bbox.x0.min(x);
            r.bbox.y0 = r.bbox.y0.min(y);
            r.bbox.x1 = r.bbox.x1.max(x);
            r.bbox.y1 = r.bbox.y1.max(y);
        }
    }
    records
}

/// Starting ball diameter for trapped-ball segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallSchedule {
    pub initial_diameter: usize,
}

impl BallSchedule {
    pub fn new(initial_diameter: usize) -> Result<Self, ParamError> {
        let schedule = Self { initial_diameter };
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.initial_diameter < 2 {
            return Err(ParamError {
                field: "initial_ball",
                value: self.initial_diameter as i64,
                permissible: "> 1",
            });
        }
        Ok(())
    }
}
