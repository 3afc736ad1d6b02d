//! Histogram modification on luma: percentile stretch and minimum dynamic range.

use crate::error::{Error, Result};
use crate::imaging::{clip_u8_f64, luma_image, on_luma, ImageBuffer};

pub fn luma_histogram(img: &ImageBuffer) -> [u64; 256] {
    let mut hist = [0u64; 256];
    for &v in luma_image(img).data() {
        hist[v as usize] += 1;
    }
    hist
}

/// Nearest-rank percentile: the smallest level whose cumulative count reaches
/// `ceil(p/100 · N)` (at least one sample).
pub fn percentile(hist: &[u64; 256], p: f64) -> u8 {
    let total: u64 = hist.iter().sum();
    let target = ((p / 100.0 * total as f64).ceil() as u64).max(1);
    let mut cum = 0;
    for (level, &count) in hist.iter().enumerate() {
        cum += count;
        if cum >= target {
            return level as u8;
        }
    }
    255
}

fn map_luma(img: &ImageBuffer, f: impl Fn(f64) -> f64) -> Result<ImageBuffer> {
    let lut: Vec<u8> = (0..256).map(|v| clip_u8_f64(f(v as f64))).collect();
    on_luma(img, |y| Ok(y.map_samples(|v| lut[v as usize])))
}

/// Moves the `low` luma percentile to 0 and the `high` percentile to 255.
pub fn linear_equalize(img: &ImageBuffer, low: f64, high: f64) -> Result<ImageBuffer> {
    if !(0.0..=100.0).contains(&low) || !(0.0..=100.0).contains(&high) || low >= high {
        return Err(Error::invalid(format!(
            "equalize percentiles need 0 <= low < high <= 100, got {low} and {high}"
        )));
    }
    let hist = luma_histogram(img);
    let (pl, ph) = (percentile(&hist, low) as f64, percentile(&hist, high) as f64);
    if ph <= pl {
        return Ok(img.clone());
    }
    map_luma(img, |v| 255.0 * (v - pl) / (ph - pl))
}

/// Stretches luma about the p5/p95 midpoint until the span reaches `range`.
/// Images that already span enough are returned untouched.
pub fn min_dynamic_range(img: &ImageBuffer, range: f64) -> Result<ImageBuffer> {
    if !(0.0..=255.0).contains(&range) {
        return Err(Error::invalid(format!(
            "dynamic range must be in [0,255], got {range}"
        )));
    }
    let hist = luma_histogram(img);
    let (p5, p95) = (percentile(&hist, 5.0) as f64, percentile(&hist, 95.0) as f64);
    let span = p95 - p5;
    if span >= range || span <= 0.0 {
        return Ok(img.clone());
    }
    let mid = (p5 + p95) / 2.0;
    let gain = range / span;
    map_luma(img, |v| mid + (v - mid) * gain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    fn gray(data: Vec<u8>) -> ImageBuffer {
        ImageBuffer::from_raw(data.len(), 1, Channels::Gray, data).unwrap()
    }

    #[test]
    fn percentile_nearest_rank() {
        let img = gray((1..=100).collect());
        let hist = luma_histogram(&img);
        assert_eq!(percentile(&hist, 5.0), 5);
        assert_eq!(percentile(&hist, 95.0), 95);
        assert_eq!(percentile(&hist, 0.0), 1);
        assert_eq!(percentile(&hist, 100.0), 100);
    }

    #[test]
    fn equalize_stretches_percentiles() {
        let img = gray((0..1000).map(|i| 100 + (i * 37 % 51) as u8).collect());
        let hist = luma_histogram(&img);
        let (p5, p95) = (percentile(&hist, 5.0), percentile(&hist, 95.0));
        let out = linear_equalize(&img, 5.0, 95.0).unwrap();
        for (a, b) in img.data().iter().zip(out.data()) {
            if *a == p5 {
                assert_eq!(*b, 0);
            }
            if *a == p95 {
                assert_eq!(*b, 255);
            }
        }
    }

    #[test]
    fn degenerate_inputs_are_unchanged() {
        let flat = ImageBuffer::filled(8, 8, Channels::Rgb, 90).unwrap();
        assert_eq!(linear_equalize(&flat, 5.0, 95.0).unwrap(), flat);
        assert_eq!(min_dynamic_range(&flat, 200.0).unwrap(), flat);
        let full = gray((0..=255).collect());
        assert_eq!(min_dynamic_range(&full, 128.0).unwrap(), full);
        assert!(linear_equalize(&full, 60.0, 40.0).is_err());
    }

    #[test]
    fn narrow_span_is_expanded() {
        let img = gray((0..400).map(|i| 108 + (i % 41) as u8).collect());
        let out = min_dynamic_range(&img, 120.0).unwrap();
        let hist = luma_histogram(&out);
        let span = percentile(&hist, 95.0) as i32 - percentile(&hist, 5.0) as i32;
        assert!(span >= 119, "span {span}");
    }
}
