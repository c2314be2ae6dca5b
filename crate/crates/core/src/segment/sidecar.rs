//! Serialized forms of a [`SegmentMap`]: a run-length encoded JSON sidecar
//! and a false-color PNG for eyeballing segment boundaries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{ColorImage, Raster};

use super::{segment_stats, SegmentMap, SegmentRecord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSidecar {
    pub width: usize,
    pub height: usize,
    pub segments: Vec<SegmentRecord>,
    /// `[label, run length]` pairs over the row-major label grid.
    pub runs: Vec<[u32; 2]>,
}

impl LabelSidecar {
    pub fn encode(map: &SegmentMap) -> Self {
        let mut runs: Vec<[u32; 2]> = Vec::new();
        for &label in map.labels().pixels() {
            match runs.last_mut() {
                Some([l, n]) if *l == label => *n += 1,
                _ => runs.push([label, 1]),
            }
        }
        Self {
            width: map.width(),
            height: map.height(),
            segments: map.segments().to_vec(),
            runs,
        }
    }

    pub fn decode(&self) -> Result<SegmentMap> {
        let mut labels = Vec::with_capacity(self.width * self.height);
        for &[label, len] in &self.runs {
            labels.extend(std::iter::repeat_n(label, len as usize));
        }
        if labels.len() != self.width * self.height {
            return Err(Error::Sidecar(format!(
                "runs cover {} pixels, expected {}",
                labels.len(),
                self.width * self.height
            )));
        }
        let map = SegmentMap::from_labels(Raster::from_vec(self.width, self.height, labels)?)?;
        if segment_stats(&map) != self.segments {
            return Err(Error::Sidecar(
                "segment records disagree with the label grid".into(),
            ));
        }
        Ok(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sidecar always serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            what: "label sidecar",
            source,
        })
    }
}

/// Paints each segment a random color drawn from `seed`; ink stays black.
pub fn visualize(map: &SegmentMap, seed: u64) -> ColorImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut palette = vec![[0u8; 3]];
    for _ in 0..map.segment_count() {
        // Keep colors away from black so outlines stay distinguishable.
        palette.push([
            rng.random_range(40..=255),
            rng.random_range(40..=255),
            rng.random_range(40..=255),
        ]);
    }
    map.labels().map(|l| palette[l as usize])
}
