use rayon::prelude::*;

use super::gaussian::blur_plane;
use super::plane::{plane_to_gray, Plane};
use crate::error::{Error, Result};
use crate::imaging::{clip_u8, luma_image, Channels, ImageBuffer};

/// Ratio between the two Gaussians of the difference-of-Gaussians operator.
pub const XDOG_K: f64 = 1.6;

/// Gradient magnitude from 3×3 Sobel kernels on luma, clamp-to-edge borders.
pub fn sobel(img: &ImageBuffer) -> ImageBuffer {
    let gray = luma_image(img);
    let (w, h) = gray.dimensions();
    let mut out = vec![0u8; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, row)| {
        let y = y as isize;
        let p = |x: isize, y: isize| gray.get_clamped(x, y, 0) as i32;
        for (x, o) in row.iter_mut().enumerate() {
            let x = x as isize;
            let gx = p(x + 1, y - 1) + 2 * p(x + 1, y) + p(x + 1, y + 1)
                - p(x - 1, y - 1)
                - 2 * p(x - 1, y)
                - p(x - 1, y + 1);
            let gy = p(x - 1, y + 1) + 2 * p(x, y + 1) + p(x + 1, y + 1)
                - p(x - 1, y - 1)
                - 2 * p(x, y - 1)
                - p(x + 1, y - 1);
            *o = clip_u8(((gx * gx + gy * gy) as f32).sqrt());
        }
    });
    ImageBuffer::from_raw(w, h, Channels::Gray, out).expect("same dims as input")
}

/// Extended difference of Gaussians on luma: `(1+p)·G_σ − p·G_{1.6σ}`.
pub fn xdog(img: &ImageBuffer, sigma: f64, p: f64) -> Result<ImageBuffer> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::invalid(format!("xdog sigma must be > 0, got {sigma}")));
    }
    if !p.is_finite() {
        return Err(Error::invalid("xdog multiplier must be finite"));
    }
    let luma = Plane::from_channel(&luma_image(img), 0);
    let narrow = blur_plane(&luma, sigma);
    if p == 0.0 {
        return Ok(plane_to_gray(&narrow));
    }
    let wide = blur_plane(&luma, sigma * XDOG_K);
    let (a, b) = ((1.0 + p) as f32, p as f32);
    let data = narrow
        .data
        .iter()
        .zip(&wide.data)
        .map(|(n, w)| a * n - b * w)
        .collect();
    Ok(plane_to_gray(&Plane {
        width: narrow.width,
        height: narrow.height,
        data,
    }))
}
