//! Reduces an input set to deduplicated, sharpness-ranked representatives.

mod hash;
mod sharpness;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

pub use hash::{hamming, perceptual_hash, Fingerprint};
pub use sharpness::{gradient_histogram, sharpness, sharpness_from_histogram, SharpnessConfig};

/// JSON schema of the serialized [`SelectionReport`].
pub const SELECTION_REPORT_SCHEMA: &str = include_str!("../../assets/schemas/selection-report.schema.json");

/// Hamming distance at or below which two images count as near-duplicates.
pub const DEFAULT_DUPLICATE_THRESHOLD: u32 = 6;

/// Result of [`select`]. Serializes to the published report schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub clusters: Vec<Vec<String>>,
    pub representatives: Vec<String>,
    pub sharpness: BTreeMap<String, f64>,
}

impl SelectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }
}

/// An image with its identifier, in input (temporal) order.
#[derive(Debug, Clone)]
pub struct Candidate {
    pub id: String,
    pub image: ImageBuffer,
}

impl Candidate {
    pub fn new(id: impl Into<String>, image: ImageBuffer) -> Self {
        Self {
            id: id.into(),
            image,
        }
    }
}

/// Greedy near-duplicate clustering in input order.
///
/// Each image joins the first cluster whose founding image lies within
/// `duplicate_threshold` bits, otherwise it founds a new cluster. The
/// sharpest member represents its cluster; ties go to the earliest image.
pub fn select(
    images: &[Candidate],
    duplicate_threshold: u32,
    cfg: &SharpnessConfig,
) -> Result<SelectionReport> {
    if images.is_empty() {
        return Err(Error::invalid("selection needs at least one image"));
    }
    let measured: Vec<(Fingerprint, f64)> = images
        .par_iter()
        .map(|c| {
            let fp = perceptual_hash(&c.image);
            let s = sharpness(&c.image, cfg).unwrap_or(0.0);
            (fp, s)
        })
        .collect();

    let mut clusters: Vec<(Fingerprint, Vec<usize>)> = Vec::new();
    for (i, &(fp, _)) in measured.iter().enumerate() {
        match clusters
            .iter_mut()
            .find(|(anchor, _)| hamming(*anchor, fp) <= duplicate_threshold)
        {
            Some((_, members)) => members.push(i),
            None => clusters.push((fp, vec![i])),
        }
    }

    let representatives = clusters
        .iter()
        .map(|(_, members)| {
            let mut best = members[0];
            for &m in &members[1..] {
                if measured[m].1 > measured[best].1 {
                    best = m;
                }
            }
            images[best].id.clone()
        })
        .collect();

    Ok(SelectionReport {
        clusters: clusters
            .iter()
            .map(|(_, m)| m.iter().map(|&i| images[i].id.clone()).collect())
            .collect(),
        representatives,
        sharpness: images
            .iter()
            .zip(&measured)
            .map(|(c, m)| (c.id.clone(), m.1))
            .collect(),
    })
}

/// `k` frame indices spread evenly over `n_frames`, non-decreasing and deduplicated.
pub fn uniform_sample(n_frames: usize, k: usize) -> Vec<usize> {
    if n_frames == 0 || k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![n_frames / 2];
    }
    let mut out: Vec<usize> = (0..k)
        .map(|i| ((i * (n_frames - 1)) as f64 / (k - 1) as f64 + 0.5).floor() as usize)
        .collect();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    fn pattern(seed: usize) -> ImageBuffer {
        ImageBuffer::from_fn(64, 64, Channels::Gray, |x, y, _| {
            let v = (x * (seed + 3) * 7 + y * (seed * 5 + 11) + (x * y) % (seed + 7)) % 256;
            v as u8
        })
        .unwrap()
    }

    #[test]
    fn uniform_sample_examples() {
        assert_eq!(uniform_sample(10, 10), (0..10).collect::<Vec<_>>());
        assert_eq!(uniform_sample(100, 5), vec![0, 25, 50, 74, 99]);
        assert_eq!(uniform_sample(3, 1), vec![1]);
        assert_eq!(uniform_sample(3, 7), vec![0, 1, 2]);
    }

    #[test]
    fn threshold_64_collapses_everything() {
        let imgs: Vec<_> = (0..5).map(|i| Candidate::new(format!("i{i}"), pattern(i))).collect();
        let r = select(&imgs, 64, &SharpnessConfig::default()).unwrap();
        assert_eq!(r.clusters.len(), 1);
        assert_eq!(r.clusters[0].len(), 5);
    }

    #[test]
    fn exact_copies_cluster_and_first_wins_ties() {
        let a = pattern(1);
        let imgs = vec![
            Candidate::new("a", a.clone()),
            Candidate::new("b", a.clone()),
        ];
        let r = select(&imgs, 0, &SharpnessConfig::default()).unwrap();
        assert_eq!(r.clusters, vec![vec!["a".to_string(), "b".to_string()]]);
        assert_eq!(r.representatives, vec!["a".to_string()]);
    }

    #[test]
    fn every_id_in_exactly_one_cluster() {
        let imgs: Vec<_> = (0..8)
            .map(|i| Candidate::new(format!("i{i}"), pattern(i % 4)))
            .collect();
        let r = select(&imgs, 6, &SharpnessConfig::default()).unwrap();
        let mut all: Vec<_> = r.clusters.concat();
        all.sort();
        let mut ids: Vec<_> = imgs.iter().map(|c| c.id.clone()).collect();
        ids.sort();
        assert_eq!(all, ids);
        assert_eq!(r.representatives.len(), r.clusters.len());
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(select(&[], 6, &SharpnessConfig::default()).is_err());
    }
}
