use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{luma_image, ImageBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharpnessConfig {
    /// Every `subsample_factor`-th pixel along each axis belongs to the sampling domain.
    pub subsample_factor: usize,
    pub bin_count: usize,
}

impl Default for SharpnessConfig {
    fn default() -> Self {
        Self {
            subsample_factor: 3,
            bin_count: 256,
        }
    }
}

impl SharpnessConfig {
    fn check(&self) -> Result<()> {
        if self.subsample_factor == 0 {
            return Err(Error::invalid("subsample_factor must be at least 1"));
        }
        if self.bin_count == 0 {
            return Err(Error::invalid("bin_count must be at least 1"));
        }
        Ok(())
    }
}

/// Histogram of floored gradient magnitudes over the subsampled domain.
pub fn gradient_histogram(img: &ImageBuffer, cfg: &SharpnessConfig) -> Result<Vec<u64>> {
    cfg.check()?;
    let gray = luma_image(img);
    let (w, h) = gray.dimensions();
    let d = gray.data();
    let at = |x: usize, y: usize| d[y * w + x] as f32;
    let axis = |prev: Option<f32>, cur: f32, next: Option<f32>| match (prev, next) {
        (Some(p), Some(n)) => (n - p) * 0.5,
        (None, Some(n)) => n - cur,
        (Some(p), None) => cur - p,
        (None, None) => 0.0,
    };
    let mut hist = vec![0u64; cfg.bin_count];
    let top = cfg.bin_count - 1;
    for y in (0..h).step_by(cfg.subsample_factor) {
        for x in (0..w).step_by(cfg.subsample_factor) {
            let cur = at(x, y);
            let gx = axis(
                (x > 0).then(|| at(x - 1, y)),
                cur,
                (x + 1 < w).then(|| at(x + 1, y)),
            );
            let gy = axis(
                (y > 0).then(|| at(x, y - 1)),
                cur,
                (y + 1 < h).then(|| at(x, y + 1)),
            );
            let mag = (gx * gx + gy * gy).sqrt().floor() as usize;
            hist[mag.min(top)] += 1;
        }
    }
    Ok(hist)
}

/// Mean over standard deviation of the gradient-magnitude distribution held in `hist`.
///
/// Returns 0 when the distribution has no spread.
pub fn sharpness_from_histogram(hist: &[u64]) -> Result<f64> {
    let n: u64 = hist.iter().sum();
    if n < 2 {
        return Err(Error::invalid(format!(
            "sharpness needs at least 2 samples, got {n}"
        )));
    }
    let n = n as f64;
    let mean = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| i as f64 * c as f64)
        .sum::<f64>()
        / n;
    let var = hist
        .iter()
        .enumerate()
        .map(|(i, &c)| c as f64 * (i as f64 - mean).powi(2))
        .sum::<f64>()
        / n;
    let std = var.sqrt();
    if std == 0.0 {
        return Ok(0.0);
    }
    Ok(mean / std)
}

pub fn sharpness(img: &ImageBuffer, cfg: &SharpnessConfig) -> Result<f64> {
    sharpness_from_histogram(&gradient_histogram(img, cfg)?)
}
