//! Print-style halftoning with antialiased dots on rotated screens.

use crate::error::{Error, Result};
use crate::imaging::{clip_u8, luma_image, Channels, ImageBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalftoneMode {
    Gray,
    Cmyk,
}

/// Screen angles in degrees, in C, M, Y, K order.
pub const CMYK_ANGLES: [f64; 4] = [15.0, 75.0, 0.0, 45.0];

/// Dot radius for a cell of the given ink coverage in [0,1].
#[inline]
pub fn dot_radius(cell: usize, coverage: f32) -> f32 {
    cell as f32 * coverage.clamp(0.0, 1.0).sqrt() / 2.0
}

/// Fraction of a pixel covered by a disk, linear ramp over one pixel.
#[inline]
fn disk_alpha(r: f32, d: f32) -> f32 {
    if r <= 0.0 {
        0.0
    } else {
        (r - d + 0.5).clamp(0.0, 1.0)
    }
}

/// Axis-aligned screen: one dot per cell×cell block sized by the block's mean ink.
fn gray_screen(ink: &[f32], w: usize, h: usize, cell: usize) -> Vec<f32> {
    let mut out = vec![0f32; w * h];
    for by in (0..h).step_by(cell) {
        for bx in (0..w).step_by(cell) {
            let (x1, y1) = ((bx + cell).min(w), (by + cell).min(h));
            let mut sum = 0f32;
            for y in by..y1 {
                sum += ink[y * w + bx..y * w + x1].iter().sum::<f32>();
            }
            let cov = sum / ((x1 - bx) * (y1 - by)) as f32;
            let r = dot_radius(cell, cov);
            let (cx, cy) = (bx as f32 + cell as f32 / 2.0, by as f32 + cell as f32 / 2.0);
            for y in by..y1 {
                for x in bx..x1 {
                    let d = ((x as f32 + 0.5 - cx).powi(2) + (y as f32 + 0.5 - cy).powi(2)).sqrt();
                    out[y * w + x] = disk_alpha(r, d);
                }
            }
        }
    }
    out
}

/// Screen rotated by `angle_deg`; each dot takes the ink value at its center.
fn rotated_screen(ink: &[f32], w: usize, h: usize, cell: usize, angle_deg: f64) -> Vec<f32> {
    let rad = angle_deg.to_radians();
    let (s, c) = (libm::sin(rad) as f32, libm::cos(rad) as f32);
    let cs = cell as f32;
    let sample = |x: f32, y: f32| {
        let xi = (x.floor().clamp(0.0, (w - 1) as f32)) as usize;
        let yi = (y.floor().clamp(0.0, (h - 1) as f32)) as usize;
        ink[yi * w + xi]
    };
    let mut out = vec![0f32; w * h];
    for y in 0..h {
        for x in 0..w {
            let (px, py) = (x as f32 + 0.5, y as f32 + 0.5);
            // screen coordinates
            let u = px * c + py * s;
            let v = -px * s + py * c;
            let (cu, cv) = (((u / cs).floor() + 0.5) * cs, ((v / cs).floor() + 0.5) * cs);
            // dot center back in image space
            let (ix, iy) = (cu * c - cv * s, cu * s + cv * c);
            let r = dot_radius(cell, sample(ix, iy));
            let d = ((u - cu).powi(2) + (v - cv).powi(2)).sqrt();
            out[y * w + x] = disk_alpha(r, d);
        }
    }
    out
}

/// Replaces tones with dots on white. Gray mode screens luma in cell-aligned
/// blocks; CMYK mode separates RGB with full gray replacement and screens each
/// ink at its own angle. Output keeps the input channel count.
pub fn halftone(img: &ImageBuffer, cell: usize, mode: HalftoneMode) -> Result<ImageBuffer> {
    if !(2..=32).contains(&cell) {
        return Err(Error::invalid(format!(
            "halftone cell must be in [2,32], got {cell}"
        )));
    }
    let (w, h) = img.dimensions();
    let gray_ink: Vec<f32> = luma_image(img)
        .data()
        .iter()
        .map(|&v| 1.0 - v as f32 / 255.0)
        .collect();
    let to_image = |samples: Vec<u8>, ch: Channels| ImageBuffer::from_raw(w, h, ch, samples);

    if mode == HalftoneMode::Gray || img.channels() == Channels::Gray {
        let alpha = match mode {
            HalftoneMode::Gray => gray_screen(&gray_ink, w, h, cell),
            HalftoneMode::Cmyk => rotated_screen(&gray_ink, w, h, cell, CMYK_ANGLES[3]),
        };
        let c = img.channel_count();
        let data = alpha
            .iter()
            .flat_map(|a| std::iter::repeat_n(clip_u8(255.0 * (1.0 - a)), c))
            .collect();
        return to_image(data, img.channels());
    }

    let n = w * h;
    let mut seps = [vec![0f32; n], vec![0f32; n], vec![0f32; n], vec![0f32; n]];
    for (i, px) in img.data().chunks_exact(3).enumerate() {
        let cmy = [px[0], px[1], px[2]].map(|v| 1.0 - v as f32 / 255.0);
        let k = cmy[0].min(cmy[1]).min(cmy[2]);
        for j in 0..3 {
            seps[j][i] = if k < 1.0 { (cmy[j] - k) / (1.0 - k) } else { 0.0 };
        }
        seps[3][i] = k;
    }
    let screens: Vec<Vec<f32>> = seps
        .iter()
        .zip(CMYK_ANGLES)
        .map(|(sep, angle)| rotated_screen(sep, w, h, cell, angle))
        .collect();
    let mut data = Vec::with_capacity(n * 3);
    for i in 0..n {
        let k = 1.0 - screens[3][i];
        for screen in &screens[..3] {
            data.push(clip_u8(255.0 * (1.0 - screen[i]) * k));
        }
    }
    to_image(data, Channels::Rgb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_gives_blank_page() {
        for mode in [HalftoneMode::Gray, HalftoneMode::Cmyk] {
            let img = ImageBuffer::filled(40, 30, Channels::Rgb, 255).unwrap();
            assert_eq!(halftone(&img, 8, mode).unwrap(), img);
        }
    }

    #[test]
    fn black_gives_tangent_dots() {
        let img = ImageBuffer::filled(64, 64, Channels::Gray, 0).unwrap();
        let out = halftone(&img, 16, HalftoneMode::Gray).unwrap();
        let ink: f64 = out.data().iter().map(|&v| 1.0 - v as f64 / 255.0).sum::<f64>() / (64.0 * 64.0);
        assert!((ink - std::f64::consts::FRAC_PI_4).abs() < 0.02, "ink {ink}");
        // cell corners stay white, centers are solid
        assert_eq!(out.get(0, 0, 0), 255);
        assert_eq!(out.get(8, 8, 0), 0);
    }

    #[test]
    fn ink_follows_disk_area() {
        let img = ImageBuffer::filled(64, 64, Channels::Gray, 128).unwrap();
        let out = halftone(&img, 16, HalftoneMode::Gray).unwrap();
        let ink: f64 = out.data().iter().map(|&v| 1.0 - v as f64 / 255.0).sum::<f64>() / (64.0 * 64.0);
        let expected = std::f64::consts::FRAC_PI_4 * (1.0 - 128.0 / 255.0);
        assert!((ink - expected).abs() < 0.02, "ink {ink} expected {expected}");
    }

    #[test]
    fn cmyk_primaries_use_one_ink() {
        let red = ImageBuffer::from_fn(48, 48, Channels::Rgb, |_, _, c| if c == 0 { 255 } else { 0 })
            .unwrap();
        let out = halftone(&red, 8, HalftoneMode::Cmyk).unwrap();
        // red = magenta + yellow, so the red channel is never inked
        assert!(out.data().chunks_exact(3).all(|p| p[0] == 255));
        assert!(out.data().chunks_exact(3).any(|p| p[1] < 128));
    }

    #[test]
    fn rejects_bad_cell() {
        let img = ImageBuffer::filled(4, 4, Channels::Gray, 0).unwrap();
        assert!(halftone(&img, 1, HalftoneMode::Gray).is_err());
        assert!(halftone(&img, 33, HalftoneMode::Gray).is_err());
    }
}
