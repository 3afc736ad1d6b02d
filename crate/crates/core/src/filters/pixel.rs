//! Per-pixel operations: tone quantization, luma scaling, thresholds and color tweaks.

use crate::error::{Error, Result};
use crate::imaging::{
    chroma_of, clip_u8, clip_u8_f64, luma, luma_f32, on_luma, yuv_to_rgb, Channels, ImageBuffer,
};

fn require_rgb(img: &ImageBuffer, op: &str) -> Result<()> {
    if img.channels() != Channels::Rgb {
        return Err(Error::invalid(format!("{op} needs a 3-channel image")));
    }
    Ok(())
}

/// Quantized value for one sample, exact integer rounding (half up).
#[inline]
pub fn posterize_value(v: u8, levels: u32) -> u8 {
    let l1 = levels - 1;
    let q = (2 * v as u32 * l1 + 255) / 510;
    ((2 * q * 255 + l1) / (2 * l1)) as u8
}

/// Quantizes each channel to `levels` evenly spaced tones.
pub fn posterize(img: &ImageBuffer, levels: u32) -> Result<ImageBuffer> {
    if !(2..=255).contains(&levels) {
        return Err(Error::invalid(format!(
            "posterize levels must be in [2,255], got {levels}"
        )));
    }
    let lut: Vec<u8> = (0..=255u8).map(|v| posterize_value(v, levels)).collect();
    Ok(img.map_samples(|v| lut[v as usize]))
}

/// Posterizes luma only; chroma is carried through unchanged.
pub fn luma_posterize(img: &ImageBuffer, levels: u32) -> Result<ImageBuffer> {
    on_luma(img, |y| posterize(y, levels))
}

/// Scales luma by `factor`, clipping at 255.
pub fn brightness(img: &ImageBuffer, factor: f64) -> Result<ImageBuffer> {
    if !(factor >= 0.0) || !factor.is_finite() {
        return Err(Error::invalid(format!(
            "brightness factor must be >= 0, got {factor}"
        )));
    }
    let lut: Vec<u8> = (0..=255u32).map(|v| clip_u8_f64(v as f64 * factor)).collect();
    on_luma(img, |y| Ok(y.map_samples(|v| lut[v as usize])))
}

/// Soft threshold response for one input level.
#[inline]
pub fn soft_threshold_value(v: u8, phi: f64, epsilon: f64) -> u8 {
    let t = (phi * (v as f64 - epsilon)).min(0.0);
    clip_u8_f64(255.0 * (1.0 + libm::tanh(t)))
}

/// `255·(1 + tanh(min(0, φ·(in − ε))))`, clipped; applied to every channel.
pub fn soft_threshold(img: &ImageBuffer, phi: f64, epsilon: f64) -> Result<ImageBuffer> {
    if !(phi >= 0.0) || !phi.is_finite() || !epsilon.is_finite() {
        return Err(Error::invalid(format!(
            "soft threshold needs phi >= 0 and finite epsilon, got phi={phi} epsilon={epsilon}"
        )));
    }
    let lut: Vec<u8> = (0..=255u8)
        .map(|v| soft_threshold_value(v, phi, epsilon))
        .collect();
    Ok(img.map_samples(|v| lut[v as usize]))
}

/// Moves each channel away from (s > 1) or toward (s < 1) the pixel's gray value.
pub fn saturate(img: &ImageBuffer, s: f64) -> Result<ImageBuffer> {
    require_rgb(img, "saturation")?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::invalid(format!("saturation must be >= 0, got {s}")));
    }
    let s = s as f32;
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let gray = luma_f32(px[0], px[1], px[2]);
        for c in px.iter_mut() {
            *c = clip_u8(gray + s * (*c as f32 - gray));
        }
    }
    Ok(out)
}

/// Rotates chroma by `angle_deg`, then adds a per-channel RGB bias.
pub fn hue(img: &ImageBuffer, angle_deg: f64, bias: [f64; 3]) -> Result<ImageBuffer> {
    require_rgb(img, "hue")?;
    let rad = angle_deg.to_radians();
    let (sin, cos) = (libm::sin(rad) as f32, libm::cos(rad) as f32);
    let bias = bias.map(|b| b as f32);
    let mut out = img.clone();
    for px in out.data_mut().chunks_exact_mut(3) {
        let y = luma(px[0], px[1], px[2]) as f32;
        let (u, v) = chroma_of(px[0], px[1], px[2]);
        let rgb = yuv_to_rgb(y, u * cos - v * sin, u * sin + v * cos);
        for (c, (val, b)) in px.iter_mut().zip(rgb.iter().zip(&bias)) {
            *c = clip_u8(val + b);
        }
    }
    Ok(out)
}

/// HSL to RGB with hue in degrees, saturation and lightness in [0,1].
pub fn hsl_to_rgb(hue_deg: f64, sat: f64, light: f64) -> [u8; 3] {
    let c = (1.0 - (2.0 * light - 1.0).abs()) * sat;
    let h = hue_deg.rem_euclid(360.0) / 60.0;
    let x = c * (1.0 - (h % 2.0 - 1.0).abs());
    let (r, g, b) = match h as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = light - c / 2.0;
    [r, g, b].map(|v| clip_u8_f64((v + m) * 255.0))
}

/// Monochrome palette: each pixel becomes HSL(hue, sat, luma/255).
pub fn colorize(img: &ImageBuffer, hue_deg: f64, sat: f64) -> Result<ImageBuffer> {
    if !(0.0..=1.0).contains(&sat) {
        return Err(Error::invalid(format!(
            "colorize saturation must be in [0,1], got {sat}"
        )));
    }
    let palette: Vec<[u8; 3]> = (0..=255u32)
        .map(|l| hsl_to_rgb(hue_deg, sat, l as f64 / 255.0))
        .collect();
    let mut data = Vec::with_capacity(img.pixel_count() * 3);
    match img.channels() {
        Channels::Gray => data.extend(img.data().iter().flat_map(|&v| palette[v as usize])),
        Channels::Rgb => data.extend(
            img.data()
                .chunks_exact(3)
                .flat_map(|p| palette[luma(p[0], p[1], p[2]) as usize]),
        ),
    }
    ImageBuffer::from_raw(img.width(), img.height(), Channels::Rgb, data)
}
