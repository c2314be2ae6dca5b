//! Binary morphology with a square structuring element.
//!
//! The element of side `d` is anchored at its top-left pixel: a ball
//! "at" `(x, y)` covers `[x, x + d) × [y, y + d)`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::{BinaryImage, Raster};

/// Anchor positions where a `diameter`-sided square fits entirely inside
/// the true-set. Diameter 1 is the identity.
pub fn erode(mask: &BinaryImage, diameter: usize) -> BinaryImage {
    assert!(
        diameter >= 1,
        "structuring element must be at least 1 pixel"
    );
    if diameter == 1 {
        return mask.clone();
    }
    let (w, h) = mask.dimensions();
    let px = mask.pixels();

    // Horizontal: true-run length starting at x, capped at `diameter`.
    let mut fits_row = vec![false; w * h];
    for y in 0..h {
        let mut run = 0usize;
        for x in (0..w).rev() {
            let i = y * w + x;
            run = if px[i] { (run + 1).min(diameter) } else { 0 };
            fits_row[i] = run == diameter;
        }
    }
    // Vertical: same over the row result.
    let mut out = vec![false; w * h];
    for x in 0..w {
        let mut run = 0usize;
        for y in (0..h).rev() {
            let i = y * w + x;
            run = if fits_row[i] {
                (run + 1).min(diameter)
            } else {
                0
            };
            out[i] = run == diameter;
        }
    }
    Raster::from_vec(w, h, out).expect("same dimensions")
}

/// Union of the squares anchored at every true pixel of `anchors`.
pub fn dilate_anchored(anchors: &BinaryImage, diameter: usize) -> BinaryImage {
    assert!(
        diameter >= 1,
        "structuring element must be at least 1 pixel"
    );
    if diameter == 1 {
        return anchors.clone();
    }
    let (w, h) = anchors.dimensions();
    let px = anchors.pixels();

    let mut row_hit = vec![false; w * h];
    for y in 0..h {
        // Distance back to the nearest anchor on this row.
        let mut since = usize::MAX;
        for x in 0..w {
            let i = y * w + x;
            since = if px[i] { 0 } else { since.saturating_add(1) };
            row_hit[i] = since < diameter;
        }
    }
    let mut out = vec![false; w * h];
    for x in 0..w {
        let mut since = usize::MAX;
        for y in 0..h {
            let i = y * w + x;
            since = if row_hit[i] {
                0
            } else {
                since.saturating_add(1)
            };
            out[i] = since < diameter;
        }
    }
    Raster::from_vec(w, h, out).expect("same dimensions")
}

/// Everything a `diameter`-sided ball covers while sliding inside `mask`,
/// starting from the anchor positions in `seed`.
///
/// The ball moves one pixel at a time (4-connected steps between anchor
/// positions) and may only occupy positions where it fits entirely in
/// `mask`, so it never squeezes through openings narrower than itself.
/// Seed pixels are always part of the result.
pub fn geodesic_dilate(
    seed: &BinaryImage,
    mask: &BinaryImage,
    diameter: usize,
) -> Result<BinaryImage> {
    seed.ensure_same_dims(mask, "geodesic_dilate")?;
    if seed
        .pixels()
        .iter()
        .zip(mask.pixels())
        .any(|(&s, &m)| s && !m)
    {
        return Err(Error::SeedOutsideMask);
    }
    let (w, h) = mask.dimensions();
    let fits = erode(mask, diameter);
    let mut reached = vec![false; w * h];
    let mut queue = VecDeque::new();
    for (i, (&s, &f)) in seed.pixels().iter().zip(fits.pixels()).enumerate() {
        if s && f {
            reached[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let (x, y) = (i % w, i / w);
        let mut visit = |j: usize| {
            if fits.pixels()[j] && !reached[j] {
                reached[j] = true;
                queue.push_back(j);
            }
        };
        if x > 0 {
            visit(i - 1);
        }
        if x + 1 < w {
            visit(i + 1);
        }
        if y > 0 {
            visit(i - w);
        }
        if y + 1 < h {
            visit(i + w);
        }
    }
    let anchors = Raster::from_vec(w, h, reached).expect("same dimensions");
    let mut covered = dilate_anchored(&anchors, diameter);
    for (c, &s) in covered.pixels_mut().iter_mut().zip(seed.pixels()) {
        *c |= s;
    }
    Ok(covered)
}
