use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParamError, Result};
use crate::raster::{round_u8, BinaryImage, ColorImage, Rgb};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantizeParams {
    pub k: usize,
    pub seed: u64,
    pub max_iterations: usize,
}

impl QuantizeParams {
    pub fn new(k: usize, seed: u64) -> Self {
        Self {
            k,
            seed,
            max_iterations: 50,
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.k == 0 {
            return Err(ParamError {
                field: "k_colors",
                value: 0,
                permissible: "> 0",
            });
        }
        if self.max_iterations == 0 {
            return Err(ParamError {
                field: "max_iterations",
                value: 0,
                permissible: ">= 1",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuantizeReport {
    /// Sum of squared RGB distances to the assigned centers, recorded after
    /// every assignment step. Empty when the input already had at most `k`
    /// distinct colors.
    pub objective: Vec<f64>,
    /// Final centers, rounded.
    pub centers: Vec<Rgb>,
}

pub fn quantize_colors(
    img: &ColorImage,
    params: &QuantizeParams,
    edge_mask: &BinaryImage,
) -> Result<ColorImage> {
    quantize_colors_with_report(img, params, edge_mask).map(|(out, _)| out)
}

/// k-means in RGB over the non-edge pixels, then every non-edge pixel is
/// replaced by its rounded cluster center.
///
/// Runs on the distinct colors weighted by pixel count. Seeding is
/// k-means++ driven by `params.seed`; Lloyd iterations stop once the
/// assignment no longer changes or after `max_iterations`. An empty
/// cluster is re-seeded at the point farthest from its own center.
pub fn quantize_colors_with_report(
    img: &ColorImage,
    params: &QuantizeParams,
    edge_mask: &BinaryImage,
) -> Result<(ColorImage, QuantizeReport)> {
    params
        .validate()
        .map_err(|e| Error::param("quantization", e))?;
    img.ensure_same_dims(edge_mask, "quantization")?;

    let mut histogram: HashMap<Rgb, u64> = HashMap::new();
    for (&px, &edge) in img.pixels().iter().zip(edge_mask.pixels()) {
        if !edge {
            *histogram.entry(px).or_default() += 1;
        }
    }
    if histogram.len() <= params.k {
        return Ok((img.clone(), QuantizeReport::default()));
    }
    let mut colors: Vec<(Rgb, u64)> = histogram.into_iter().collect();
    colors.sort_unstable();
    let points: Vec<[f64; 3]> = colors.iter().map(|(c, _)| c.map(|v| v as f64)).collect();
    let weights: Vec<f64> = colors.iter().map(|&(_, n)| n as f64).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut centers = kmeans_plus_plus(&points, &weights, params.k, &mut rng);
    let mut objective = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    for _ in 0..params.max_iterations {
        let (assigned, cost) = assign(&points, &weights, &centers);
        objective.push(cost);
        if previous.as_ref() == Some(&assigned) {
            break;
        }
        update_centers(&points, &weights, &assigned, &mut centers);
        previous = Some(assigned);
    }
    let (assignment, _) = assign(&points, &weights, &centers);

    let rounded: Vec<Rgb> = centers.iter().map(|c| c.map(round_u8)).collect();
    let lookup: HashMap<Rgb, Rgb> = colors
        .iter()
        .zip(&assignment)
        .map(|(&(c, _), &a)| (c, rounded[a]))
        .collect();
    let mut out = img.clone();
    for (px, &edge) in out.pixels_mut().iter_mut().zip(edge_mask.pixels()) {
        if !edge {
            *px = lookup[px];
        }
    }
    Ok((
        out,
        QuantizeReport {
            objective,
            centers: rounded,
        },
    ))
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (0..3).map(|c| (a[c] - b[c]).powi(2)).sum()
}

fn kmeans_plus_plus(
    points: &[[f64; 3]],
    weights: &[f64],
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<[f64; 3]> {
    let pick = |scores: &[f64], rng: &mut ChaCha8Rng| {
        let total: f64 = scores.iter().sum();
        let mut target = rng.random::<f64>() * total;
        for (i, &s) in scores.iter().enumerate() {
            if target < s {
                return i;
            }
            target -= s;
        }
        // Floating-point leftovers: last point with non-zero score.
        scores.iter().rposition(|&s| s > 0.0).unwrap_or(0)
    };

    let mut centers = vec![points[pick(weights, rng)]];
    let mut nearest: Vec<f64> = points.iter().map(|p| dist2(p, &centers[0])).collect();
    while centers.len() < k {
        let scores: Vec<f64> = nearest.iter().zip(weights).map(|(d, w)| d * w).collect();
        let next = points[pick(&scores, rng)];
        for (d, p) in nearest.iter_mut().zip(points) {
            *d = d.min(dist2(p, &next));
        }
        centers.push(next);
    }
    centers
}

/// Nearest center per point (ties to the lower index) and the weighted cost.
fn assign(points: &[[f64; 3]], weights: &[f64], centers: &[[f64; 3]]) -> (Vec<usize>, f64) {
    let mut cost = 0.0;
    let assignment = points
        .iter()
        .zip(weights)
        .map(|(p, w)| {
            let (best, d) = centers
                .iter()
                .enumerate()
                .map(|(i, c)| (i, dist2(p, c)))
                .fold(
                    (0, f64::INFINITY),
                    |acc, cur| if cur.1 < acc.1 { cur } else { acc },
                );
            cost += w * d;
            best
        })
        .collect();
    (assignment, cost)
}

fn update_centers(
    points: &[[f64; 3]],
    weights: &[f64],
    assignment: &[usize],
    centers: &mut [[f64; 3]],
) {
    let k = centers.len();
    let mut sums = vec![[0f64; 3]; k];
    let mut mass = vec![0f64; k];
    for ((p, &w), &a) in points.iter().zip(weights).zip(assignment) {
        for c in 0..3 {
            sums[a][c] += w * p[c];
        }
        mass[a] += w;
    }
    for i in 0..k {
        if mass[i] > 0.0 {
            centers[i] = sums[i].map(|s| s / mass[i]);
        }
    }
    // Re-seed empty clusters at the points farthest from their centers.
    let mut taken = vec![false; points.len()];
    for i in 0..k {
        if mass[i] > 0.0 {
            continue;
        }
        let far = points
            .iter()
            .enumerate()
            .filter(|&(j, _)| !taken[j])
            .map(|(j, p)| (j, dist2(p, &centers[assignment[j]])))
            .fold(
                (usize::MAX, -1.0),
                |acc, cur| if cur.1 > acc.1 { cur } else { acc },
            );
        if far.0 != usize::MAX {
            taken[far.0] = true;
            centers[i] = points[far.0];
        }
    }
}
