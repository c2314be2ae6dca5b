//! Two-pass union-find connected-component labelling.

use crate::raster::{BinaryImage, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Component labels (0 = background, `1..=n` in raster order of each
/// component's first pixel) and their areas (`areas[label - 1]`).
#[derive(Debug, Clone)]
pub struct Components {
    pub labels: Raster<u32>,
    pub areas: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.areas.len()
    }
}

pub fn connected_components(mask: &BinaryImage, connectivity: Connectivity) -> Components {
    label_regions(mask, connectivity, |&v| v)
}

/// Labels maximal connected regions of pixels that pass `include` and hold
/// equal values.
pub fn label_regions<T: Copy + PartialEq>(
    grid: &Raster<T>,
    connectivity: Connectivity,
    include: impl Fn(&T) -> bool,
) -> Components {
    let (w, h) = grid.dimensions();
    let px = grid.pixels();
    let mut provisional = vec![0u32; w * h];
    let mut forest = UnionFind::default();

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let v = px[i];
            if !include(&v) {
                continue;
            }
            let mut label = 0u32;
            let consider = |j: usize, label: &mut u32, forest: &mut UnionFind| {
                let n = provisional[j];
                if n != 0 && px[j] == v {
                    if *label == 0 {
                        *label = n;
                    } else {
                        forest.union(*label, n);
                    }
                }
            };
            if x > 0 {
                consider(i - 1, &mut label, &mut forest);
            }
            if y > 0 {
                consider(i - w, &mut label, &mut forest);
                if connectivity == Connectivity::Eight {
                    if x > 0 {
                        consider(i - w - 1, &mut label, &mut forest);
                    }
                    if x + 1 < w {
                        consider(i - w + 1, &mut label, &mut forest);
                    }
                }
            }
            if label == 0 {
                label = forest.make_set();
            }
            provisional[i] = label;
        }
    }

    // Second pass: resolve roots and renumber by first appearance.
    let mut final_label = vec![0u32; forest.parent.len()];
    let mut areas = Vec::new();
    let mut labels = vec![0u32; w * h];
    for (out, &p) in labels.iter_mut().zip(&provisional) {
        if p == 0 {
            continue;
        }
        let root = forest.find(p) as usize;
        if final_label[root] == 0 {
            areas.push(0);
            final_label[root] = areas.len() as u32;
        }
        let l = final_label[root];
        areas[l as usize - 1] += 1;
        *out = l;
    }
    Components {
        labels: Raster::from_vec(w, h, labels).expect("same dimensions"),
        areas,
    }
}

/// Disjoint sets over provisional labels `1..`; index 0 is unused.
struct UnionFind {
    parent: Vec<u32>,
}

impl Default for UnionFind {
    fn default() -> Self {
        Self { parent: vec![0] }
    }
}

impl UnionFind {
    fn make_set(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::VecDeque;

    /// Breadth-first flood fill labelling, visited in raster order.
    fn flood_fill_labels(mask: &BinaryImage, connectivity: Connectivity) -> Vec<u32> {
        let (w, h) = mask.dimensions();
        let mut labels = vec![0u32; w * h];
        let mut next = 0;
        for start in 0..w * h {
            if !mask.pixels()[start] || labels[start] != 0 {
                continue;
            }
            next += 1;
            labels[start] = next;
            let mut queue = VecDeque::from([start]);
            while let Some(i) = queue.pop_front() {
                let (x, y) = ((i % w) as i64, (i / w) as i64);
                for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if (dx == 0 && dy == 0)
                            || (connectivity == Connectivity::Four && dx != 0 && dy != 0)
                        {
                            continue;
                        }
                        let (nx, ny) = (x + dx, y + dy);
                        if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                            continue;
                        }
                        let j = ny as usize * w + nx as usize;
                        if mask.pixels()[j] && labels[j] == 0 {
                            labels[j] = next;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        labels
    }

    #[test]
    fn empty_mask_has_no_components() {
        let cc = connected_components(&BinaryImage::filled(8, 8, false), Connectivity::Four);
        assert_eq!(cc.count(), 0);
        assert!(cc.labels.pixels().iter().all(|&l| l == 0));
    }

    #[test]
    fn diagonal_pair() {
        let mask = BinaryImage::from_fn(2, 2, |x, y| x == y);
        assert_eq!(connected_components(&mask, Connectivity::Four).count(), 2);
        assert_eq!(connected_components(&mask, Connectivity::Eight).count(), 1);
    }

    #[test]
    fn matches_flood_fill_on_random_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for density in [0.3, 0.5, 0.6, 0.8] {
            let mask = BinaryImage::from_fn(64, 64, |_, _| rng.random_bool(density));
            for conn in [Connectivity::Four, Connectivity::Eight] {
                let cc = connected_components(&mask, conn);
                let oracle = flood_fill_labels(&mask, conn);
                // Both number components by first pixel in raster order.
                assert_eq!(cc.labels.pixels(), oracle.as_slice());
                let total: usize = cc.areas.iter().sum();
                assert_eq!(total, mask.count_ink());
            }
        }
    }

    #[test]
    fn u_shape_merges_late() {
        // Two arms that only join on the bottom row.
        let mask = BinaryImage::from_fn(5, 4, |x, y| x == 0 || x == 4 || y == 3);
        let cc = connected_components(&mask, Connectivity::Four);
        assert_eq!(cc.count(), 1);
        assert_eq!(cc.areas, vec![11]);
    }

    #[test]
    fn regions_split_on_value() {
        let grid = Raster::from_vec(4, 1, vec![1u32, 1, 2, 1]).unwrap();
        let cc = label_regions(&grid, Connectivity::Four, |&v| v != 0);
        assert_eq!(cc.labels.pixels(), &[1, 1, 2, 3]);
    }
}
