//! Edge tangent flow: a smoothed field of directions along image edges, and the
//! flow-guided line integral convolution that turns it into a painterly filter.

use rayon::prelude::*;

use super::fastmath::{half_one_plus_tanh, simd_kernel};
use super::plane::{planes_to_image, Plane};
use crate::error::{Error, Result};
use crate::imaging::{luma_image, ImageBuffer};

/// Unit tangent per pixel plus the normalized gradient magnitude that weights it.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentField {
    pub width: usize,
    pub height: usize,
    pub tx: Vec<f32>,
    pub ty: Vec<f32>,
    /// Gradient magnitude over the image maximum, in [0, 1].
    pub magnitude: Vec<f32>,
}

impl TangentField {
    /// Sobel gradients rotated by 90°; flat pixels get the tangent (1, 0).
    pub fn from_image(img: &ImageBuffer) -> Self {
        let gray = luma_image(img);
        let (w, h) = gray.dimensions();
        let p = |x: isize, y: isize| gray.get_clamped(x, y, 0) as f32;
        let mut gx = vec![0f32; w * h];
        let mut gy = vec![0f32; w * h];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let i = y as usize * w + x as usize;
                gx[i] = p(x + 1, y - 1) + 2.0 * p(x + 1, y) + p(x + 1, y + 1)
                    - p(x - 1, y - 1)
                    - 2.0 * p(x - 1, y)
                    - p(x - 1, y + 1);
                gy[i] = p(x - 1, y + 1) + 2.0 * p(x, y + 1) + p(x + 1, y + 1)
                    - p(x - 1, y - 1)
                    - 2.0 * p(x, y - 1)
                    - p(x + 1, y - 1);
            }
        }
        let mags: Vec<f32> = gx.iter().zip(&gy).map(|(a, b)| (a * a + b * b).sqrt()).collect();
        let max = mags.iter().copied().fold(0f32, f32::max);
        let mut tx = Vec::with_capacity(w * h);
        let mut ty = Vec::with_capacity(w * h);
        for i in 0..w * h {
            if mags[i] > 0.0 {
                tx.push(-gy[i] / mags[i]);
                ty.push(gx[i] / mags[i]);
            } else {
                tx.push(1.0);
                ty.push(0.0);
            }
        }
        let magnitude = mags
            .iter()
            .map(|&m| if max > 0.0 { m / max } else { 0.0 })
            .collect();
        Self {
            width: w,
            height: h,
            tx,
            ty,
            magnitude,
        }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> (f32, f32) {
        let i = y * self.width + x;
        (self.tx[i], self.ty[i])
    }

    /// Copy of `values` with a zero border of `pad` pixels.
    fn zero_padded(&self, values: &[f32], pad: usize) -> Vec<f32> {
        let pw = self.width + 2 * pad;
        let mut out = vec![0f32; pw * (self.height + 2 * pad)];
        for (y, row) in values.chunks_exact(self.width).enumerate() {
            let start = (y + pad) * pw + pad;
            out[start..start + self.width].copy_from_slice(row);
        }
        out
    }

    /// One smoothing pass over a disk of `radius`.
    ///
    /// Each neighbor contributes its tangent weighted by the magnitude term
    /// `(1 + tanh(m(y) − m(x)))/2` and by the signed alignment `t(x)·t(y)`.
    /// Neighbors outside the image are skipped.
    pub fn refine(&self, radius: usize) -> TangentField {
        let (w, h) = (self.width, self.height);
        let r = radius as isize;
        let pw = w + 2 * radius;
        // outside pixels get a zero tangent, so they add nothing
        let ptx = self.zero_padded(&self.tx, radius);
        let pty = self.zero_padded(&self.ty, radius);
        let pm = self.zero_padded(&self.magnitude, radius);
        let offsets: Vec<isize> = (-r..=r)
            .flat_map(|dy| (-r..=r).map(move |dx| (dx, dy)))
            .filter(|(dx, dy)| dx * dx + dy * dy <= r * r)
            .map(|(dx, dy)| dy * pw as isize + dx)
            .collect();

        let mut tx = vec![0f32; w * h];
        let mut ty = vec![0f32; w * h];
        tx.par_chunks_mut(w)
            .zip(ty.par_chunks_mut(w))
            .enumerate()
            .for_each_init(
                || (vec![0f32; w], vec![0f32; w]),
                |(sx, sy), (y, (rx, ry))| {
                    let base = (y + radius) * pw + radius;
                    let planes = [&ptx[..], &pty[..], &pm[..]];
                    refine_row(planes, base, &offsets, sx, sy);
                    for x in 0..w {
                        let n = (sx[x] * sx[x] + sy[x] * sy[x]).sqrt();
                        if n > 1e-12 {
                            rx[x] = sx[x] / n;
                            ry[x] = sy[x] / n;
                        } else {
                            rx[x] = 1.0;
                            ry[x] = 0.0;
                        }
                    }
                },
            );
        TangentField {
            width: w,
            height: h,
            tx,
            ty,
            magnitude: self.magnitude.clone(),
        }
    }
}

simd_kernel! {
/// Accumulates the unnormalized refined tangents of one row. `planes` holds
/// the zero-padded tx, ty and magnitude; `base` is the row's first pixel.
fn refine_row(planes: [&[f32]; 3], base: usize, offsets: &[isize], sx: &mut [f32], sy: &mut [f32]) {
    let w = sx.len();
    let [ptx, pty, pm] = planes;
    sx.fill(0.0);
    sy.fill(0.0);
    let (cx, cy, cm) = (&ptx[base..base + w], &pty[base..base + w], &pm[base..base + w]);
    for &off in offsets {
        let s = (base as isize + off) as usize;
        let (ux, uy, um) = (&ptx[s..s + w], &pty[s..s + w], &pm[s..s + w]);
        for x in 0..w {
            let wm = half_one_plus_tanh(um[x] - cm[x]);
            let k = wm * (cx[x] * ux[x] + cy[x] * uy[x]);
            sx[x] += k * ux[x];
            sy[x] += k * uy[x];
        }
    }
}
}

/// Smoothed tangent field after `iterations` refinement passes.
pub fn edge_tangent_flow(img: &ImageBuffer, radius: usize, iterations: u32) -> TangentField {
    let mut field = TangentField::from_image(img);
    for _ in 0..iterations {
        field = field.refine(radius);
    }
    field
}

/// Gaussian-weighted average along the streamline through each pixel,
/// `half_length` unit steps in both directions.
pub fn line_integral_convolution(
    img: &ImageBuffer,
    field: &TangentField,
    half_length: usize,
) -> ImageBuffer {
    let planes = Plane::planes(img);
    let (w, h) = img.dimensions();
    let sigma = (half_length as f32 / 2.0).max(0.5);
    let weights: Vec<f32> = (0..=half_length)
        .map(|s| (-((s * s) as f32) / (2.0 * sigma * sigma)).exp())
        .collect();
    let c = planes.len();

    // Streamlines of one row are advanced together, step by step, so the
    // dependent loads of different pixels overlap.
    let rows: Vec<Vec<f32>> = (0..h)
        .into_par_iter()
        .map(|y| {
            let mut acc = vec![0f32; w * c];
            let mut wsum = vec![weights[0]; w];
            for (ch, p) in planes.iter().enumerate() {
                for x in 0..w {
                    acc[ch * w + x] = weights[0] * p.at(x, y);
                }
            }
            let (mut px, mut py) = (vec![0f32; w], vec![0f32; w]);
            let (mut dx, mut dy) = (vec![0f32; w], vec![0f32; w]);
            let mut alive = vec![true; w];
            for sign in [1f32, -1f32] {
                for x in 0..w {
                    let (t0x, t0y) = field.at(x, y);
                    px[x] = x as f32;
                    py[x] = y as f32;
                    dx[x] = sign * t0x;
                    dy[x] = sign * t0y;
                    alive[x] = true;
                }
                for &wt in &weights[1..] {
                    for x in 0..w {
                        if !alive[x] {
                            continue;
                        }
                        let (qx, qy) = (px[x] + dx[x], py[x] + dy[x]);
                        if qx < 0.0 || qy < 0.0 || qx > (w - 1) as f32 || qy > (h - 1) as f32 {
                            alive[x] = false;
                            continue;
                        }
                        px[x] = qx;
                        py[x] = qy;
                        for (ch, p) in planes.iter().enumerate() {
                            acc[ch * w + x] += wt * p.sample(qx, qy);
                        }
                        wsum[x] += wt;
                        let (nx, ny) = field.at((qx + 0.5) as usize, (qy + 0.5) as usize);
                        let flip = if nx * dx[x] + ny * dy[x] < 0.0 { -1.0 } else { 1.0 };
                        dx[x] = flip * nx;
                        dy[x] = flip * ny;
                    }
                }
            }
            for ch in 0..c {
                for x in 0..w {
                    acc[ch * w + x] /= wsum[x];
                }
            }
            acc
        })
        .collect();
    let mut out_planes: Vec<Plane> = (0..c).map(|_| Plane::new(w, h)).collect();
    for (y, row) in rows.iter().enumerate() {
        for (ch, out) in out_planes.iter_mut().enumerate() {
            out.data[y * w..(y + 1) * w].copy_from_slice(&row[ch * w..(ch + 1) * w]);
        }
    }
    planes_to_image(&out_planes)
}

/// Flow-guided smoothing: tangent field refinement followed by line integral
/// convolution over an arc of `2·radius` pixels.
pub fn etf(img: &ImageBuffer, radius: usize, iterations: u32) -> Result<ImageBuffer> {
    if radius == 0 || iterations == 0 {
        return Err(Error::invalid(format!(
            "etf needs radius >= 1 and iterations >= 1, got {radius} and {iterations}"
        )));
    }
    let field = edge_tangent_flow(img, radius, iterations);
    Ok(line_integral_convolution(img, &field, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    fn stripes() -> ImageBuffer {
        ImageBuffer::from_fn(32, 32, Channels::Gray, |x, _, _| if x < 16 { 30 } else { 220 })
            .unwrap()
    }

    #[test]
    fn constant_image_stays_constant() {
        let img = ImageBuffer::filled(20, 15, Channels::Rgb, 77).unwrap();
        assert_eq!(etf(&img, 3, 2).unwrap(), img);
        let f = edge_tangent_flow(&img, 3, 1);
        assert!(f.tx.iter().all(|&v| v == 1.0) && f.ty.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_edge_gives_vertical_tangents() {
        let f = edge_tangent_flow(&stripes(), 4, 1);
        for y in 0..32 {
            for x in [15, 16] {
                let (tx, ty) = f.at(x, y);
                let angle = tx.abs().atan2(ty.abs()).to_degrees();
                assert!(angle < 5.0, "({x},{y}) deviates {angle}");
            }
        }
    }

    #[test]
    fn field_stays_unit_length() {
        let img = ImageBuffer::from_fn(24, 24, Channels::Gray, |x, y, _| {
            ((x * x + y * 3 * x + y * 17) % 256) as u8
        })
        .unwrap();
        let mut f = TangentField::from_image(&img);
        for _ in 0..3 {
            f = f.refine(3);
            for (a, b) in f.tx.iter().zip(&f.ty) {
                assert!(((a * a + b * b).sqrt() - 1.0).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn smoothing_does_not_cross_the_edge() {
        let out = etf(&stripes(), 4, 2).unwrap();
        assert_eq!(out.get(8, 10, 0), 30);
        assert_eq!(out.get(24, 10, 0), 220);
        assert_eq!(out.get(15, 10, 0), 30);
    }

    #[test]
    fn rejects_zero_radius() {
        assert!(etf(&stripes(), 0, 1).is_err());
    }
}
