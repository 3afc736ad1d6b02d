//! Style ranking. The built-in scorer is a cheap stand-in for a learned
//! aesthetic model; anything implementing [`Scorer`] can replace it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{luma_histogram, percentile, sobel};
use crate::imaging::{chroma_of, Channels, ImageBuffer};
use crate::pipeline::{execute, StylePipeline};

/// Rates one stylized image; higher is better. Implementations must be reentrant.
pub trait Scorer: Sync {
    fn id(&self) -> &str;
    fn score_image(&self, img: &ImageBuffer) -> f64;
}

/// Mean Sobel magnitude on luma, in [0,1].
pub fn edge_density(img: &ImageBuffer) -> f64 {
    sobel(img).mean() / 255.0
}

/// Chroma spread `sqrt(var U + var V)` scaled to roughly [0,1]; 0 for gray images.
pub fn colorfulness(img: &ImageBuffer) -> f64 {
    if img.channels() == Channels::Gray {
        return 0.0;
    }
    let n = img.pixel_count() as f64;
    let (mut su, mut sv, mut suu, mut svv) = (0f64, 0f64, 0f64, 0f64);
    for p in img.data().chunks_exact(3) {
        let (u, v) = chroma_of(p[0], p[1], p[2]);
        let (u, v) = (u as f64, v as f64);
        su += u;
        sv += v;
        suu += u * u;
        svv += v * v;
    }
    let var_u = (suu / n - (su / n).powi(2)).max(0.0);
    let var_v = (svv / n - (sv / n).powi(2)).max(0.0);
    (var_u + var_v).sqrt() / 128.0
}

/// Luma p95 − p5 over 255.
pub fn dynamic_range(img: &ImageBuffer) -> f64 {
    let hist = luma_histogram(img);
    (percentile(&hist, 95.0) as f64 - percentile(&hist, 5.0) as f64) / 255.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub edges: f64,
    pub color: f64,
    pub range: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            edges: 0.4,
            color: 0.3,
            range: 0.3,
        }
    }
}

/// Weighted sum of edge density, colorfulness and luma dynamic range.
#[derive(Debug, Clone, Default)]
pub struct HeuristicScorer {
    pub weights: ScoreWeights,
}

impl Scorer for HeuristicScorer {
    fn id(&self) -> &str {
        "heuristic-v1"
    }

    fn score_image(&self, img: &ImageBuffer) -> f64 {
        let w = &self.weights;
        w.edges * edge_density(img) + w.color * colorfulness(img) + w.range * dynamic_range(img)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredStyle {
    pub style: StylePipeline,
    pub score: f64,
    pub scorer_id: String,
}

/// Mean score of the style over the probes. Per-probe values are summed in
/// sorted order so the result does not depend on probe order.
pub fn score(style: &StylePipeline, probes: &[ImageBuffer], scorer: &dyn Scorer) -> Result<ScoredStyle> {
    if probes.is_empty() {
        return Err(Error::invalid("scoring needs at least one probe image"));
    }
    let mut values = probes
        .iter()
        .map(|p| execute(style, p).map(|out| scorer.score_image(&out)))
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    let score = values.iter().sum::<f64>() / values.len() as f64;
    if !score.is_finite() {
        return Err(Error::invalid(format!(
            "scorer {} returned a non-finite value",
            scorer.id()
        )));
    }
    Ok(ScoredStyle {
        style: style.clone(),
        score,
        scorer_id: scorer.id().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{FilterBlock, FilterKind};

    fn colorful() -> ImageBuffer {
        ImageBuffer::from_fn(32, 32, Channels::Rgb, |x, y, c| {
            [((x * 8) % 256) as u8, ((y * 8) % 256) as u8, 90][c]
        })
        .unwrap()
    }

    #[test]
    fn flat_gray_has_no_color() {
        let gray = ImageBuffer::filled(16, 16, Channels::Rgb, 128).unwrap();
        let out = execute(&StylePipeline::new("id"), &gray).unwrap();
        assert_eq!(colorfulness(&out), 0.0);
        assert_eq!(edge_density(&out), 0.0);
        assert_eq!(dynamic_range(&out), 0.0);
    }

    #[test]
    fn saturation_never_lowers_colorfulness() {
        let img = colorful();
        let plain = execute(&StylePipeline::new("id"), &img).unwrap();
        let vivid = StylePipeline::new("v").with_background(vec![FilterBlock::new(FilterKind::Saturation)
            .with("saturation", 2.0)
            .unwrap()]);
        let out = execute(&vivid, &img).unwrap();
        assert!(colorfulness(&out) >= colorfulness(&plain));
    }

    #[test]
    fn probe_order_does_not_matter() {
        let probes = vec![
            colorful(),
            ImageBuffer::filled(20, 20, Channels::Rgb, 30).unwrap(),
            ImageBuffer::from_fn(24, 24, Channels::Rgb, |x, _, _| (x * 10) as u8).unwrap(),
        ];
        let style = StylePipeline::new("s").with_background(vec![FilterBlock::new(FilterKind::XDoG)]);
        let scorer = HeuristicScorer::default();
        let a = score(&style, &probes, &scorer).unwrap();
        let mut rev = probes.clone();
        rev.reverse();
        let b = score(&style, &rev, &scorer).unwrap();
        assert_eq!(a.score.to_bits(), b.score.to_bits());
        assert!(score(&style, &[], &scorer).is_err());
    }
}
