//! BT.601 full-range luma/chroma split and its inverse.

use super::buffer::{clip_u8, Channels, ImageBuffer};
use crate::error::{Error, Result};

const KR: f32 = 0.299;
const KG: f32 = 0.587;
const KB: f32 = 0.114;

/// Luma of one RGB pixel, exact weights in thousandths, rounded half up.
#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

/// Unrounded luma.
#[inline]
pub fn luma_f32(r: u8, g: u8, b: u8) -> f32 {
    KR * r as f32 + KG * g as f32 + KB * b as f32
}

#[inline]
pub fn chroma_of(r: u8, g: u8, b: u8) -> (f32, f32) {
    let (r, g, b) = (r as f32, g as f32, b as f32);
    let u = -0.168_736 * r - 0.331_264 * g + 0.5 * b;
    let v = 0.5 * r - 0.418_688 * g - 0.081_312 * b;
    (u, v)
}

/// Inverse transform, unclipped.
#[inline]
pub fn yuv_to_rgb(y: f32, u: f32, v: f32) -> [f32; 3] {
    [
        y + 1.402 * v,
        y - 0.344_136 * u - 0.714_136 * v,
        y + 1.772 * u,
    ]
}

/// Inverse transform brought into gamut by shrinking chroma toward gray, so
/// luma survives even where plain clipping would shift it. Overshoot of up to
/// half a level (what luma rounding alone produces) is left to the final clip.
#[inline]
pub fn yuv_to_rgb_in_gamut(y: f32, u: f32, v: f32) -> [f32; 3] {
    const LO: f32 = -0.5;
    const HI: f32 = 255.5;
    let rgb = yuv_to_rgb(y, u, v);
    let y = y.clamp(0.0, 255.0);
    let mut t = 1f32;
    for c in rgb {
        let d = c - y;
        if c > HI {
            t = t.min((HI - y) / d);
        } else if c < LO {
            t = t.min((LO - y) / d);
        }
    }
    if t >= 1.0 {
        rgb
    } else {
        rgb.map(|c| y + t * (c - y))
    }
}

/// Signed chroma saved by [`to_gray`] so [`to_color`] can restore color.
#[derive(Debug, Clone, PartialEq)]
pub struct ChromaPlanes {
    width: usize,
    height: usize,
    u: Vec<f32>,
    v: Vec<f32>,
}

impl ChromaPlanes {
    pub fn new(width: usize, height: usize, u: Vec<f32>, v: Vec<f32>) -> Result<Self> {
        if u.len() != width * height || v.len() != width * height {
            return Err(Error::invalid("chroma plane length does not match dimensions"));
        }
        Ok(Self { width, height, u, v })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            u: vec![0.0; width * height],
            v: vec![0.0; width * height],
        }
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn u(&self) -> &[f32] {
        &self.u
    }

    pub fn v(&self) -> &[f32] {
        &self.v
    }

    /// Rotates every (U,V) vector by `angle_deg`.
    pub fn rotated(&self, angle_deg: f64) -> ChromaPlanes {
        let rad = angle_deg.to_radians();
        let (s, c) = (libm::sin(rad) as f32, libm::cos(rad) as f32);
        let (u, v) = self
            .u
            .iter()
            .zip(&self.v)
            .map(|(&u, &v)| (u * c - v * s, u * s + v * c))
            .unzip();
        ChromaPlanes {
            width: self.width,
            height: self.height,
            u,
            v,
        }
    }

    /// Bilinear resample, used when a resize happens between the split and the merge.
    pub fn resized(&self, width: usize, height: usize) -> ChromaPlanes {
        if (width, height) == (self.width, self.height) {
            return self.clone();
        }
        let u = super::resize::bilinear_plane_f32(&self.u, self.width, self.height, width, height);
        let v = super::resize::bilinear_plane_f32(&self.v, self.width, self.height, width, height);
        ChromaPlanes { width, height, u, v }
    }
}

/// Splits an RGB image into rounded luma and its chroma planes.
pub fn to_gray(img: &ImageBuffer) -> Result<(ImageBuffer, ChromaPlanes)> {
    if img.channels() != Channels::Rgb {
        return Err(Error::invalid("to_gray needs a 3-channel image"));
    }
    let n = img.pixel_count();
    let mut y = Vec::with_capacity(n);
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for px in img.data().chunks_exact(3) {
        y.push(luma(px[0], px[1], px[2]));
        let (cu, cv) = chroma_of(px[0], px[1], px[2]);
        u.push(cu);
        v.push(cv);
    }
    let (w, h) = img.dimensions();
    Ok((
        ImageBuffer::from_raw(w, h, Channels::Gray, y)?,
        ChromaPlanes {
            width: w,
            height: h,
            u,
            v,
        },
    ))
}

/// Recombines luma with saved chroma. Out-of-gamut colors keep their luma and
/// hue and lose saturation.
pub fn to_color(luma: &ImageBuffer, chroma: &ChromaPlanes) -> Result<ImageBuffer> {
    if luma.channels() != Channels::Gray {
        return Err(Error::invalid("to_color needs a 1-channel luma image"));
    }
    if luma.dimensions() != chroma.dimensions() {
        return Err(Error::invalid(format!(
            "luma is {}x{} but chroma is {}x{}",
            luma.width(),
            luma.height(),
            chroma.width,
            chroma.height
        )));
    }
    let mut out = Vec::with_capacity(luma.pixel_count() * 3);
    for ((&y, &u), &v) in luma.data().iter().zip(&chroma.u).zip(&chroma.v) {
        let rgb = yuv_to_rgb_in_gamut(y as f32, u, v);
        out.extend(rgb.iter().map(|&c| clip_u8(c)));
    }
    ImageBuffer::from_raw(luma.width(), luma.height(), Channels::Rgb, out)
}

/// Luma of any image: RGB is converted, gray is returned as is.
pub fn luma_image(img: &ImageBuffer) -> ImageBuffer {
    match img.channels() {
        Channels::Gray => img.clone(),
        Channels::Rgb => {
            let data = img
                .data()
                .chunks_exact(3)
                .map(|p| luma(p[0], p[1], p[2]))
                .collect();
            ImageBuffer::from_raw(img.width(), img.height(), Channels::Gray, data)
                .expect("dimensions come from a valid image")
        }
    }
}

/// Runs a luma transform, restoring chroma for RGB input.
pub fn on_luma(
    img: &ImageBuffer,
    f: impl FnOnce(&ImageBuffer) -> Result<ImageBuffer>,
) -> Result<ImageBuffer> {
    match img.channels() {
        Channels::Gray => f(img),
        Channels::Rgb => {
            let (y, chroma) = to_gray(img)?;
            let y2 = f(&y)?;
            to_color(&y2, &chroma.resized(y2.width(), y2.height()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_pixel_has_zero_chroma() {
        let img = ImageBuffer::filled(2, 2, Channels::Rgb, 128).unwrap();
        let (y, c) = to_gray(&img).unwrap();
        assert!(y.data().iter().all(|&v| v == 128));
        assert!(c.u().iter().chain(c.v()).all(|v| v.abs() < 1e-4));
        assert_eq!(to_color(&y, &c).unwrap(), img);
    }

    #[test]
    fn pure_red_luma() {
        // 0.299 * 255 = 76.245
        assert_eq!(luma(255, 0, 0), 76);
        assert_eq!(luma(0, 255, 0), 150);
        assert_eq!(luma(0, 0, 255), 29);
        assert_eq!(luma(255, 255, 255), 255);
    }

    #[test]
    fn luma_matches_scalar_reference() {
        for r in (0..=255u32).step_by(5) {
            for g in (0..=255u32).step_by(7) {
                for b in (0..=255u32).step_by(11) {
                    let exact = 0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64;
                    let got = luma(r as u8, g as u8, b as u8) as f64;
                    assert!((got - exact).abs() <= 0.5 + 1e-3, "{r},{g},{b}");
                }
            }
        }
    }

    #[test]
    fn single_channel_input_is_rejected() {
        let img = ImageBuffer::new(3, 3, Channels::Gray).unwrap();
        assert!(matches!(to_gray(&img), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn mismatched_chroma_is_rejected() {
        let y = ImageBuffer::new(3, 3, Channels::Gray).unwrap();
        assert!(to_color(&y, &ChromaPlanes::zeros(3, 4)).is_err());
    }

    #[test]
    fn gray_ramp_with_zero_chroma_is_unchanged() {
        let y = ImageBuffer::from_fn(256, 1, Channels::Gray, |x, _, _| x as u8).unwrap();
        let rgb = to_color(&y, &ChromaPlanes::zeros(256, 1)).unwrap();
        assert_eq!(rgb, y.to_rgb());
    }

    #[test]
    fn full_rgb_cube_round_trips_within_two() {
        let mut worst = 0i32;
        for r in (0..=255u16).step_by(3) {
            for g in (0..=255u16).step_by(3) {
                let img = ImageBuffer::from_fn(86, 1, Channels::Rgb, |x, _, c| {
                    [r as u8, g as u8, (x * 3).min(255) as u8][c]
                })
                .unwrap();
                let (y, ch) = to_gray(&img).unwrap();
                let back = to_color(&y, &ch).unwrap();
                for (a, b) in img.data().iter().zip(back.data()) {
                    worst = worst.max((*a as i32 - *b as i32).abs());
                }
            }
        }
        assert!(worst <= 2, "worst round-trip error {worst}");
    }
}
