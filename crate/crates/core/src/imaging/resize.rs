//! Resampling: repeated 2×2 box halving followed by a final bilinear pass.

use super::buffer::{clip_u8, ImageBuffer};
use crate::error::{Error, Result};

/// Resizes to exactly `new_w`×`new_h`.
///
/// While both dimensions are at least twice the target the image is halved
/// with a 2×2 box filter (an odd trailing row/column is dropped); the
/// remaining factor is covered by bilinear interpolation with pixel-center
/// alignment.
pub fn resize(img: &ImageBuffer, new_w: usize, new_h: usize) -> Result<ImageBuffer> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::invalid(format!(
            "resize target must be at least 1x1, got {new_w}x{new_h}"
        )));
    }
    if img.dimensions() == (new_w, new_h) {
        return Ok(img.clone());
    }
    let mut cur = None;
    loop {
        let src = cur.as_ref().unwrap_or(img);
        if src.width() >= 2 * new_w && src.height() >= 2 * new_h {
            cur = Some(halve(src));
        } else {
            break;
        }
    }
    let src = cur.as_ref().unwrap_or(img);
    if src.dimensions() == (new_w, new_h) {
        return Ok(cur.unwrap_or_else(|| img.clone()));
    }
    Ok(bilinear(src, new_w, new_h))
}

/// Sequence of dimensions visited by the halving stage.
pub fn halving_chain(w: usize, h: usize, new_w: usize, new_h: usize) -> Vec<(usize, usize)> {
    let mut chain = vec![(w, h)];
    let (mut w, mut h) = (w, h);
    if (w, h) == (new_w, new_h) {
        return chain;
    }
    while w >= 2 * new_w && h >= 2 * new_h {
        w /= 2;
        h /= 2;
        chain.push((w, h));
    }
    chain
}

/// One 2×2 box-filter halving step, rounding half up.
pub fn halve(img: &ImageBuffer) -> ImageBuffer {
    let c = img.channel_count();
    let (w, h) = (img.width() / 2, img.height() / 2);
    let src = img.data();
    let stride = img.width() * c;
    let mut out = Vec::with_capacity(w * h * c);
    for y in 0..h {
        let r0 = &src[2 * y * stride..];
        let r1 = &src[(2 * y + 1) * stride..];
        for x in 0..w {
            for ch in 0..c {
                let i = 2 * x * c + ch;
                let sum = r0[i] as u16 + r0[i + c] as u16 + r1[i] as u16 + r1[i + c] as u16;
                out.push(((sum + 2) >> 2) as u8);
            }
        }
    }
    ImageBuffer::from_raw(w.max(1), h.max(1), img.channels(), out)
        .expect("halving is only applied to images at least 2x2")
}

#[derive(Clone, Copy)]
struct Tap {
    i0: usize,
    i1: usize,
    frac: f32,
}

fn taps(src: usize, dst: usize) -> Vec<Tap> {
    let scale = src as f32 / dst as f32;
    (0..dst)
        .map(|d| {
            let s = ((d as f32 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f32);
            let i0 = s.floor() as usize;
            let i1 = (i0 + 1).min(src - 1);
            Tap {
                i0,
                i1,
                frac: s - i0 as f32,
            }
        })
        .collect()
}

/// Bilinear resampling with pixel-center alignment and clamped borders.
pub fn bilinear(img: &ImageBuffer, new_w: usize, new_h: usize) -> ImageBuffer {
    let c = img.channel_count();
    let xt = taps(img.width(), new_w);
    let yt = taps(img.height(), new_h);
    let mut out = Vec::with_capacity(new_w * new_h * c);
    let mut row0 = vec![0f32; new_w * c];
    let mut row1 = vec![0f32; new_w * c];
    let horizontal = |y: usize, dst: &mut [f32]| {
        let row = img.row(y);
        for (x, t) in xt.iter().enumerate() {
            for ch in 0..c {
                let a = row[t.i0 * c + ch] as f32;
                let b = row[t.i1 * c + ch] as f32;
                dst[x * c + ch] = a + (b - a) * t.frac;
            }
        }
    };
    for t in &yt {
        horizontal(t.i0, &mut row0);
        horizontal(t.i1, &mut row1);
        for (a, b) in row0.iter().zip(&row1) {
            out.push(clip_u8(a + (b - a) * t.frac));
        }
    }
    ImageBuffer::from_raw(new_w, new_h, img.channels(), out).expect("target dims are nonzero")
}

pub(crate) fn bilinear_plane_f32(
    src: &[f32],
    w: usize,
    h: usize,
    new_w: usize,
    new_h: usize,
) -> Vec<f32> {
    let xt = taps(w, new_w);
    let yt = taps(h, new_h);
    let mut out = Vec::with_capacity(new_w * new_h);
    for t in &yt {
        let r0 = &src[t.i0 * w..(t.i0 + 1) * w];
        let r1 = &src[t.i1 * w..(t.i1 + 1) * w];
        for xtap in &xt {
            let a = r0[xtap.i0] + (r0[xtap.i1] - r0[xtap.i0]) * xtap.frac;
            let b = r1[xtap.i0] + (r1[xtap.i1] - r1[xtap.i0]) * xtap.frac;
            out.push(a + (b - a) * t.frac);
        }
    }
    out
}

/// Dimensions after scaling so that `max(w, h) <= max_dim`; unchanged if already within.
pub fn fit_dimensions(w: usize, h: usize, max_dim: usize) -> (usize, usize) {
    let longest = w.max(h);
    if longest <= max_dim || max_dim == 0 {
        return (w, h);
    }
    let s = max_dim as f64 / longest as f64;
    let scale = |v: usize| (((v as f64) * s).round() as usize).clamp(1, max_dim);
    (scale(w), scale(h))
}

/// Downscales so the longest side is at most `max_dim`.
pub fn fit_max_dim(img: &ImageBuffer, max_dim: usize) -> Result<ImageBuffer> {
    if max_dim == 0 {
        return Err(Error::invalid("max_dim must be at least 1"));
    }
    let (w, h) = fit_dimensions(img.width(), img.height(), max_dim);
    resize(img, w, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageBuffer::filled(100, 100, Channels::Rgb, 77).unwrap();
        for (w, h) in [(1, 1), (9, 8), (37, 100), (100, 100), (250, 13), (400, 300)] {
            let r = resize(&img, w, h).unwrap();
            assert_eq!(r.dimensions(), (w, h));
            assert!(r.data().iter().all(|&v| v == 77), "{w}x{h}");
        }
    }

    #[test]
    fn one_box_step_equals_block_means() {
        let img = ImageBuffer::from_fn(8, 8, Channels::Gray, |x, y, _| {
            ((x * 37 + y * 91 + x * y * 13) % 256) as u8
        })
        .unwrap();
        let r = resize(&img, 4, 4).unwrap();
        for y in 0..4 {
            for x in 0..4 {
                let s: u32 = [(0, 0), (1, 0), (0, 1), (1, 1)]
                    .iter()
                    .map(|(dx, dy)| img.get(2 * x + dx, 2 * y + dy, 0) as u32)
                    .sum();
                let expected = ((s as f64) / 4.0 + 0.5).floor() as u8;
                assert_eq!(r.get(x, y, 0), expected);
            }
        }
    }

    #[test]
    fn full_hd_to_hash_size_chain() {
        let chain = halving_chain(1920, 1080, 9, 8);
        let widths: Vec<_> = chain.iter().map(|d| d.0).collect();
        assert_eq!(widths, vec![1920, 960, 480, 240, 120, 60, 30, 15]);
        assert_eq!(*chain.last().unwrap(), (15, 8));
    }

    #[test]
    fn zero_target_is_rejected() {
        let img = ImageBuffer::filled(4, 4, Channels::Gray, 1).unwrap();
        assert!(resize(&img, 0, 3).is_err());
    }

    #[test]
    fn identity_when_dimensions_match() {
        let img = ImageBuffer::from_fn(7, 5, Channels::Rgb, |x, y, c| (x * y + c) as u8).unwrap();
        assert_eq!(resize(&img, 7, 5).unwrap(), img);
    }

    #[test]
    fn fit_dimensions_caps_longest_side() {
        assert_eq!(fit_dimensions(1920, 1080, 720), (720, 405));
        assert_eq!(fit_dimensions(100, 50, 720), (100, 50));
        assert_eq!(fit_dimensions(50, 1000, 100), (5, 100));
    }

    proptest::proptest! {
        #[test]
        fn output_within_input_range(
            w in 1usize..40, h in 1usize..40, tw in 1usize..60, th in 1usize..60, seed in 0u64..1000
        ) {
            let img = ImageBuffer::from_fn(w, h, Channels::Gray, |x, y, _| {
                ((x as u64 * 7919 + y as u64 * 104729 + seed * 31) % 251) as u8
            }).unwrap();
            let lo = *img.data().iter().min().unwrap();
            let hi = *img.data().iter().max().unwrap();
            let r = resize(&img, tw, th).unwrap();
            proptest::prop_assert_eq!(r.dimensions(), (tw, th));
            proptest::prop_assert!(r.data().iter().all(|&v| v >= lo && v <= hi));
        }
    }
}
