//! Bilateral smoothing and the residual-scaling detail control built on it.

use rayon::prelude::*;

use super::fastmath::{exp_nonpos, simd_kernel};
use super::plane::{planes_to_image, Plane};
use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilateralParams {
    pub spatial_sigma: f64,
    pub range_sigma: f64,
    pub radius: usize,
}

/// Parameters used by detail control.
pub const DETAIL_BILATERAL: BilateralParams = BilateralParams {
    spatial_sigma: 3.0,
    range_sigma: 25.0,
    radius: 9,
};

/// Disk of offsets `dx² + dy² <= r²` with their spatial weights.
fn spatial_taps(p: &BilateralParams) -> Vec<(isize, isize, f32)> {
    let r = p.radius as isize;
    let mut taps = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = dx * dx + dy * dy;
            if d2 <= r * r {
                let w = libm::exp(-(d2 as f64) / (2.0 * p.spatial_sigma * p.spatial_sigma));
                taps.push((dx, dy, w as f32));
            }
        }
    }
    taps
}

simd_kernel! {
fn accumulate_row(
    padded: &[f32],
    base: usize,
    offsets: &[(isize, f32)],
    neg_inv_2sr2: f32,
    sum_w: &mut [f32],
    sum_v: &mut [f32],
    row: &mut [f32],
) {
    let w = row.len();
    sum_w.fill(0.0);
    sum_v.fill(0.0);
    let center = &padded[base..base + w];
    for &(off, ws) in offsets {
        let start = (base as isize + off) as usize;
        let neigh = &padded[start..start + w];
        for (((&n, &c), sw), sv) in neigh.iter().zip(center).zip(sum_w.iter_mut()).zip(sum_v.iter_mut()) {
            let d = n - c;
            let wt = ws * exp_nonpos(d * d * neg_inv_2sr2);
            *sw += wt;
            *sv += wt * n;
        }
    }
    for ((o, &sv), &sw) in row.iter_mut().zip(sum_v.iter()).zip(sum_w.iter()) {
        *o = sv / sw;
    }
}
}

/// Unrounded bilateral filter of one plane over a disk of `radius`.
pub fn bilateral_plane(src: &Plane, p: &BilateralParams) -> Plane {
    let taps = spatial_taps(p);
    let neg_inv_2sr2 = (-1.0 / (2.0 * p.range_sigma * p.range_sigma)) as f32;
    let r = p.radius;
    let padded = src.padded(r);
    let pw = padded.width;
    let (w, h) = (src.width, src.height);
    // Per-tap offsets into the padded plane.
    let offsets: Vec<(isize, f32)> = taps
        .iter()
        .map(|&(dx, dy, ws)| (dy * pw as isize + dx, ws))
        .collect();

    let mut out = Plane::new(w, h);
    out.data
        .par_chunks_mut(w)
        .enumerate()
        .for_each_init(
            || (vec![0f32; w], vec![0f32; w]),
            |(sum_w, sum_v), (y, row)| {
                let base = (y + r) * pw + r;
                accumulate_row(&padded.data, base, &offsets, neg_inv_2sr2, sum_w, sum_v, row);
            },
        );
    out
}

/// Bilateral filter of every channel, rounded.
pub fn bilateral(img: &ImageBuffer, p: &BilateralParams) -> ImageBuffer {
    let planes: Vec<Plane> = Plane::planes(img)
        .iter()
        .map(|pl| bilateral_plane(pl, p))
        .collect();
    planes_to_image(&planes)
}

/// `B + (1 + δ/100)·(I − B)` with `B` the bilateral base layer.
///
/// δ = 0 is the identity, δ = −100 returns the base layer, δ > 0 boosts detail.
pub fn detail_control(img: &ImageBuffer, delta: f64) -> Result<ImageBuffer> {
    if !delta.is_finite() {
        return Err(Error::invalid("detail delta must be finite"));
    }
    if delta == 0.0 {
        return Ok(img.clone());
    }
    let gain = (1.0 + delta / 100.0) as f32;
    let planes: Vec<Plane> = Plane::planes(img)
        .into_iter()
        .map(|pl| {
            let base = bilateral_plane(&pl, &DETAIL_BILATERAL);
            let data = base
                .data
                .iter()
                .zip(&pl.data)
                .map(|(b, i)| b + gain * (i - b))
                .collect();
            Plane {
                width: pl.width,
                height: pl.height,
                data,
            }
        })
        .collect();
    Ok(planes_to_image(&planes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    fn noisy(w: usize, h: usize) -> ImageBuffer {
        ImageBuffer::from_fn(w, h, Channels::Gray, |x, y, _| {
            let base = if x < w / 2 { 60 } else { 190 };
            (base + (x * 7 + y * 13) % 21) as u8
        })
        .unwrap()
    }

    #[test]
    fn zero_delta_is_identity() {
        let img = noisy(20, 20);
        assert_eq!(detail_control(&img, 0.0).unwrap(), img);
    }

    #[test]
    fn full_smoothing_returns_base() {
        let img = noisy(20, 20);
        assert_eq!(
            detail_control(&img, -100.0).unwrap(),
            bilateral(&img, &DETAIL_BILATERAL)
        );
    }

    #[test]
    fn constant_is_fixed_point() {
        let img = ImageBuffer::filled(12, 12, Channels::Rgb, 33).unwrap();
        assert_eq!(bilateral(&img, &DETAIL_BILATERAL), img);
        assert_eq!(detail_control(&img, 60.0).unwrap(), img);
    }

    #[test]
    fn edges_survive_smoothing() {
        let img = ImageBuffer::from_fn(30, 10, Channels::Gray, |x, _, _| if x < 15 { 20 } else { 230 })
            .unwrap();
        let b = bilateral(&img, &DETAIL_BILATERAL);
        assert!(b.get(14, 5, 0) < 25);
        assert!(b.get(15, 5, 0) > 225);
    }
}
