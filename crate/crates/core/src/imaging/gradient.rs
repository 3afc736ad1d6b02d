use super::buffer::{Channels, ImageBuffer};
use crate::error::{Error, Result};

/// Per-pixel central-difference gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub gx: Vec<f32>,
    pub gy: Vec<f32>,
}

impl GradientField {
    #[inline]
    pub fn at(&self, x: usize, y: usize) -> (f32, f32) {
        let i = y * self.width + x;
        (self.gx[i], self.gy[i])
    }

    /// Euclidean magnitude at every pixel.
    pub fn magnitude(&self) -> Vec<f32> {
        self.gx
            .iter()
            .zip(&self.gy)
            .map(|(a, b)| (a * a + b * b).sqrt())
            .collect()
    }
}

#[inline]
fn diff(prev: f32, cur: f32, next: f32, has_prev: bool, has_next: bool) -> f32 {
    match (has_prev, has_next) {
        (true, true) => (next - prev) * 0.5,
        (false, true) => next - cur,
        (true, false) => cur - prev,
        (false, false) => 0.0,
    }
}

/// Central differences in the interior, one-sided differences on borders.
pub fn central_gradient(img: &ImageBuffer) -> Result<GradientField> {
    if img.channels() != Channels::Gray {
        return Err(Error::invalid("central_gradient needs a 1-channel image"));
    }
    let (w, h) = img.dimensions();
    let d = img.data();
    let at = |x: usize, y: usize| d[y * w + x] as f32;
    let mut gx = Vec::with_capacity(w * h);
    let mut gy = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let cur = at(x, y);
            gx.push(diff(
                if x > 0 { at(x - 1, y) } else { cur },
                cur,
                if x + 1 < w { at(x + 1, y) } else { cur },
                x > 0,
                x + 1 < w,
            ));
            gy.push(diff(
                if y > 0 { at(x, y - 1) } else { cur },
                cur,
                if y + 1 < h { at(x, y + 1) } else { cur },
                y > 0,
                y + 1 < h,
            ));
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        gx,
        gy,
    })
}
