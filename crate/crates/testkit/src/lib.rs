//! Shared test support: reference filters, random inputs and the property
//! checks behind the acceptance report.

pub mod checks;
pub mod oracles;

use storyboard_core::procedural::StyleRng;
use storyboard_core::{Channels, ImageBuffer};

/// A random image of 1..=`max_side` pixels per side: uniform noise, a noisy
/// gradient, or flat blocks with hard edges, gray or RGB.
pub fn random_image(seed: u64, max_side: usize) -> ImageBuffer {
    let mut rng = StyleRng::new(seed ^ 0x5EED_0F_1A6E);
    let w = rng.int(1, max_side as i64) as usize;
    let h = rng.int(1, max_side as i64) as usize;
    let channels = if rng.chance(0.5) { Channels::Rgb } else { Channels::Gray };
    let kind = rng.below(3);
    let n = w * h * channels.count();
    let data: Vec<u8> = match kind {
        0 => (0..n).map(|_| rng.below(256) as u8).collect(),
        1 => {
            let (a, b) = (rng.real(-8.0, 8.0), rng.real(-8.0, 8.0));
            let base = rng.real(0.0, 255.0);
            let c = channels.count();
            (0..n)
                .map(|i| {
                    let p = i / c;
                    let (x, y) = ((p % w) as f64, (p / w) as f64);
                    let noise = rng.real(-12.0, 12.0);
                    (base + a * x + b * y + noise).round().clamp(0.0, 255.0) as u8
                })
                .collect()
        }
        _ => {
            let cell = rng.int(2, 8) as usize;
            let c = channels.count();
            let colors: Vec<u8> = (0..64 * c).map(|_| rng.below(256) as u8).collect();
            (0..n)
                .map(|i| {
                    let (p, ch) = (i / c, i % c);
                    let (x, y) = (p % w, p / w);
                    let block = ((x / cell) * 7 + (y / cell) * 13) % 64;
                    colors[block * c + ch]
                })
                .collect()
        }
    };
    ImageBuffer::from_raw(w, h, channels, data).unwrap()
}

/// Median of a non-empty list.
pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
