use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Raster};

use super::components::{connected_components, label_regions, Connectivity};
use super::morph::erode;
use super::{BallSchedule, SegmentMap};

const NONE: u32 = u32::MAX;

/// Cumulative segment counts after each phase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseCounts {
    /// `(diameter, segments so far)` for each ball pass, largest first.
    pub ball_passes: Vec<(usize, usize)>,
    pub after_expansion: usize,
    pub after_fill: usize,
}

pub fn trapped_ball_segment(lines: &BinaryImage, schedule: BallSchedule) -> Result<SegmentMap> {
    trapped_ball_segment_traced(lines, schedule).map(|(map, _)| map)
}

/// [`trapped_ball_segment`] that also reports the per-phase segment counts.
pub fn trapped_ball_segment_traced(
    lines: &BinaryImage,
    schedule: BallSchedule,
) -> Result<(SegmentMap, PhaseCounts)> {
    schedule
        .validate()
        .map_err(|e| Error::param("segmentation", e))?;
    let (w, h) = lines.dimensions();
    let free: Vec<bool> = lines.pixels().iter().map(|&ink| !ink).collect();
    let mut labels = vec![0u32; w * h];
    let mut next_id = 1u32;
    let mut ball_passes = Vec::new();

    for diameter in (2..=schedule.initial_diameter).rev() {
        ball_pass(w, h, &free, &mut labels, &mut next_id, diameter);
        ball_passes.push((diameter, next_id as usize - 1));
    }

    expand_regions(w, h, &free, &mut labels);
    let after_expansion = next_id as usize - 1;

    // Ball of size 1: every remaining pocket of free space is its own segment.
    let leftover = BinaryImage::from_vec(
        w,
        h,
        free.iter()
            .zip(&labels)
            .map(|(&f, &l)| f && l == 0)
            .collect(),
    )?;
    let pockets = connected_components(&leftover, Connectivity::Four);
    for (label, &pocket) in labels.iter_mut().zip(pockets.labels.pixels()) {
        if pocket != 0 {
            *label = next_id + pocket - 1;
        }
    }
    next_id += pockets.count() as u32;

    let map = SegmentMap::from_labels(Raster::from_vec(w, h, labels)?)?;
    let counts = PhaseCounts {
        ball_passes,
        after_expansion,
        after_fill: next_id as usize - 1,
    };
    Ok((map, counts))
}

/// One trapped-ball pass at `diameter` over the still-unassigned pixels.
///
/// Each 4-connected component of fitting ball positions claims the pixels
/// its balls cover; where balls of different components overlap, the
/// component found first in raster order wins. If that leaves a
/// component's claim in several pieces, only the largest piece is kept and
/// the rest stays unassigned for later passes.
fn ball_pass(
    w: usize,
    h: usize,
    free: &[bool],
    labels: &mut [u32],
    next_id: &mut u32,
    diameter: usize,
) {
    let unassigned = BinaryImage::from_vec(
        w,
        h,
        free.iter()
            .zip(labels.iter())
            .map(|(&f, &l)| f && l == 0)
            .collect(),
    )
    .expect("same dimensions");
    let core = erode(&unassigned, diameter);
    let anchors = connected_components(&core, Connectivity::Four);
    if anchors.count() == 0 {
        return;
    }

    let cover = lowest_covering_anchor(&anchors.labels, diameter);
    let claims: Vec<u32> = cover
        .iter()
        .zip(unassigned.pixels())
        .map(|(&c, &u)| if u && c != NONE { c } else { 0 })
        .collect();
    let claims = Raster::from_vec(w, h, claims).expect("same dimensions");
    let pieces = label_regions(&claims, Connectivity::Four, |&c| c != 0);

    // Largest piece per component; ties go to the piece found first.
    let mut best = vec![0u32; anchors.count() + 1];
    for (&claim, &piece) in claims.pixels().iter().zip(pieces.labels.pixels()) {
        if claim == 0 {
            continue;
        }
        let current = best[claim as usize];
        if current == 0 {
            best[claim as usize] = piece;
            continue;
        }
        let (a_cur, a_new) = (
            pieces.areas[current as usize - 1],
            pieces.areas[piece as usize - 1],
        );
        if a_new > a_cur || (a_new == a_cur && piece < current) {
            best[claim as usize] = piece;
        }
    }

    let mut new_id = vec![0u32; anchors.count() + 1];
    for (component, &piece) in best.iter().enumerate().skip(1) {
        if piece != 0 {
            new_id[component] = *next_id;
            *next_id += 1;
        }
    }
    for ((label, &claim), &piece) in labels
        .iter_mut()
        .zip(claims.pixels())
        .zip(pieces.labels.pixels())
    {
        if claim != 0 && best[claim as usize] == piece {
            *label = new_id[claim as usize];
        }
    }
}

/// For each pixel, the lowest anchor label whose `diameter`-sided square
/// (anchored top-left) covers it, or [`NONE`].
fn lowest_covering_anchor(anchors: &Raster<u32>, diameter: usize) -> Vec<u32> {
    let (w, h) = anchors.dimensions();
    let seeded: Vec<u32> = anchors
        .pixels()
        .iter()
        .map(|&l| if l == 0 { NONE } else { l })
        .collect();
    let mut rows = vec![NONE; w * h];
    for y in 0..h {
        trailing_min(
            &seeded[y * w..(y + 1) * w],
            diameter,
            &mut rows[y * w..(y + 1) * w],
        );
    }
    let mut out = vec![NONE; w * h];
    let mut column = vec![NONE; h];
    let mut column_out = vec![NONE; h];
    for x in 0..w {
        for y in 0..h {
            column[y] = rows[y * w + x];
        }
        trailing_min(&column, diameter, &mut column_out);
        for y in 0..h {
            out[y * w + x] = column_out[y];
        }
    }
    out
}

/// `dst[i] = min(src[i + 1 - window ..= i])`, clipped at the start.
fn trailing_min(src: &[u32], window: usize, dst: &mut [u32]) {
    let mut deque: VecDeque<usize> = VecDeque::with_capacity(window + 1);
    for (i, &v) in src.iter().enumerate() {
        while deque.back().is_some_and(|&j| src[j] >= v) {
            deque.pop_back();
        }
        deque.push_back(i);
        if deque[0] + window <= i {
            deque.pop_front();
        }
        dst[i] = src[deque[0]];
    }
}

/// Grows every segment into the unassigned free pixels it can reach,
/// breadth first and in lock step. A pixel reached by several fronts at
/// the same distance takes the lowest segment id.
fn expand_regions(w: usize, h: usize, free: &[bool], labels: &mut [u32]) {
    let mut reached_at = vec![NONE; w * h];
    let mut frontier: Vec<usize> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        if label != 0 {
            reached_at[i] = 0;
            frontier.push(i);
        }
    }
    let mut level = 0u32;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &i in &frontier {
            let label = labels[i];
            let (x, y) = (i % w, i / w);
            let neighbours = [
                (x > 0).then(|| i - 1),
                (x + 1 < w).then(|| i + 1),
                (y > 0).then(|| i - w),
                (y + 1 < h).then(|| i + w),
            ];
            for j in neighbours.into_iter().flatten() {
                if !free[j] {
                    continue;
                }
                if reached_at[j] == NONE {
                    reached_at[j] = level + 1;
                    labels[j] = label;
                    next.push(j);
                } else if reached_at[j] == level + 1 && label < labels[j] {
                    labels[j] = label;
                }
            }
        }
        frontier = next;
        level += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(d: usize) -> BallSchedule {
        BallSchedule::new(d).unwrap()
    }

    /// Two 40x40 rooms with a 2-pixel-thick dividing wall holding a gap.
    fn two_rooms(gap: usize) -> BinaryImage {
        let (w, h) = (84, 42);
        BinaryImage::from_fn(w, h, |x, y| {
            let border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let wall = (41..43).contains(&x);
            let opening = (20..20 + gap).contains(&y);
            border || (wall && !opening)
        })
    }

    #[test]
    fn blank_page_is_one_segment() {
        let lines = BinaryImage::filled(50, 50, false);
        let map = trapped_ball_segment(&lines, schedule(4)).unwrap();
        assert_eq!(map.segment_count(), 1);
        assert_eq!(map.segments()[0].pixel_count, 2500);
    }

    #[test]
    fn closed_wall_gives_two_rooms() {
        let map = trapped_ball_segment(&two_rooms(0), schedule(4)).unwrap();
        assert_eq!(map.segment_count(), 2);
        assert_ne!(map.label(10, 10), map.label(70, 10));
    }

    #[test]
    fn small_gap_does_not_leak() {
        let map = trapped_ball_segment(&two_rooms(2), schedule(4)).unwrap();
        let (left, right) = (map.label(10, 10), map.label(70, 10));
        assert_ne!(left, right);
        assert!(left != 0 && right != 0);
    }

    #[test]
    fn wide_gap_leaks() {
        let map = trapped_ball_segment(&two_rooms(6), schedule(4)).unwrap();
        assert_eq!(map.label(10, 10), map.label(70, 10));
    }

    #[test]
    fn rejects_small_ball() {
        assert!(trapped_ball_segment(
            &two_rooms(0),
            BallSchedule {
                initial_diameter: 1
            }
        )
        .is_err());
    }

    #[test]
    fn one_pixel_pockets_become_segments() {
        // Isolated free pixels enclosed by ink.
        let lines = BinaryImage::from_fn(7, 7, |x, y| !(x % 2 == 1 && y % 2 == 1));
        let (map, counts) = trapped_ball_segment_traced(&lines, schedule(3)).unwrap();
        assert_eq!(map.segment_count(), 9);
        assert_eq!(counts.after_expansion, 0);
        assert_eq!(counts.after_fill, 9);
    }

    #[test]
    fn expansion_ties_go_to_lower_id() {
        // Two rooms joined by a 1-pixel corridor of odd length; the middle
        // pixel is equidistant from both.
        let lines = BinaryImage::from_fn(25, 7, |x, y| {
            let left = (0..8).contains(&x) && (1..6).contains(&y);
            let right = (17..25).contains(&x) && (1..6).contains(&y);
            let corridor = y == 3;
            !(left || right || corridor)
        });
        let map = trapped_ball_segment(&lines, schedule(3)).unwrap();
        let (l, r) = (map.label(2, 3), map.label(20, 3));
        assert_eq!((l, r), (1, 2));
        // Corridor runs x = 8..=16; x = 12 is the midpoint.
        for x in 8..12 {
            assert_eq!(map.label(x, 3), l);
        }
        assert_eq!(map.label(12, 3), l);
        for x in 13..17 {
            assert_eq!(map.label(x, 3), r);
        }
    }

    #[test]
    fn trailing_min_window() {
        let src = [5, 3, 8, 1, 9, 9, 2];
        let mut dst = [0; 7];
        trailing_min(&src, 3, &mut dst);
        assert_eq!(dst, [5, 3, 3, 1, 1, 1, 2]);
        trailing_min(&src, 1, &mut dst);
        assert_eq!(dst, src);
    }
}
