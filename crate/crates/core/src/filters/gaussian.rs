use rayon::prelude::*;

use super::plane::{planes_to_image, Plane};
use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

/// Normalized 1-D Gaussian taps with radius `ceil(3σ)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let w: Vec<f64> = (-r..=r)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let sum: f64 = w.iter().sum();
    w.iter().map(|v| (v / sum) as f32).collect()
}

/// Separable blur of one plane with clamp-to-edge borders.
pub fn blur_plane(src: &Plane, sigma: f64) -> Plane {
    let k = gaussian_kernel(sigma);
    let r = k.len() / 2;
    let (w, h) = (src.width, src.height);

    let mut tmp = Plane::new(w, h);
    tmp.data.par_chunks_mut(w).enumerate().for_each_init(
        || vec![0f32; w + 2 * r],
        |padded, (y, out)| {
            let row = &src.data[y * w..(y + 1) * w];
            padded[..r].fill(row[0]);
            padded[r..r + w].copy_from_slice(row);
            padded[r + w..].fill(row[w - 1]);
            for (x, o) in out.iter_mut().enumerate() {
                let win = &padded[x..x + k.len()];
                let mut acc = 0f32;
                for (a, b) in win.iter().zip(&k) {
                    acc += a * b;
                }
                *o = acc;
            }
        },
    );

    let mut out = Plane::new(w, h);
    out.data.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        for (i, &kv) in k.iter().enumerate() {
            let sy = (y as isize + i as isize - r as isize).clamp(0, h as isize - 1) as usize;
            let src_row = &tmp.data[sy * w..(sy + 1) * w];
            for (o, s) in row.iter_mut().zip(src_row) {
                *o += kv * s;
            }
        }
    });
    out
}

/// Gaussian smoothing of every channel.
pub fn gaussian(img: &ImageBuffer, sigma: f64) -> Result<ImageBuffer> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("gaussian sigma must be > 0, got {sigma}")));
    }
    let planes: Vec<Plane> = Plane::planes(img)
        .iter()
        .map(|p| blur_plane(p, sigma))
        .collect();
    Ok(planes_to_image(&planes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    #[test]
    fn kernel_is_normalized_with_three_sigma_radius() {
        for sigma in [0.3, 1.0, 2.0, 2.5, 7.9] {
            let k = gaussian_kernel(sigma);
            assert_eq!(k.len(), 2 * (3.0 * sigma as f64).ceil() as usize + 1);
            let s: f32 = k.iter().sum();
            assert!((s - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn constant_is_unchanged() {
        let img = ImageBuffer::filled(20, 11, Channels::Rgb, 143).unwrap();
        assert_eq!(gaussian(&img, 3.0).unwrap(), img);
    }

    #[test]
    fn nonpositive_sigma_is_rejected() {
        let img = ImageBuffer::filled(4, 4, Channels::Gray, 1).unwrap();
        assert!(gaussian(&img, 0.0).is_err());
        assert!(gaussian(&img, -1.0).is_err());
    }

    #[test]
    fn impulse_matches_dense_gaussian() {
        let mut img = ImageBuffer::new(33, 33, Channels::Gray).unwrap();
        img.set(16, 16, 0, 255);
        let out = gaussian(&img, 2.0).unwrap();
        let k = gaussian_kernel(2.0);
        let r = (k.len() / 2) as i64;
        for y in 0..33i64 {
            for x in 0..33i64 {
                let (dx, dy) = (x - 16, y - 16);
                let expected = if dx.abs() <= r && dy.abs() <= r {
                    255.0 * k[(dx + r) as usize] as f64 * k[(dy + r) as usize] as f64
                } else {
                    0.0
                };
                let got = out.get(x as usize, y as usize, 0) as f64;
                assert!((got - expected).abs() <= 1.0, "({x},{y}) {got} vs {expected}");
            }
        }
    }

    #[test]
    fn mean_is_preserved_on_interior_dominated_image() {
        let img = ImageBuffer::from_fn(64, 64, Channels::Gray, |x, y, _| {
            if (16..48).contains(&x) && (16..48).contains(&y) {
                ((x * 37 + y * 11) % 200) as u8
            } else {
                100
            }
        })
        .unwrap();
        let out = gaussian(&img, 2.0).unwrap();
        assert!((out.mean() - img.mean()).abs() <= 0.5);
    }
}
