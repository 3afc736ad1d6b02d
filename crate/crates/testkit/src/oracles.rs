//! Naive reference filters: plain f64 loops over clamped neighborhoods,
//! written from the filter definitions rather than from the optimized code.

use storyboard_core::{Channels, ImageBuffer};

fn round_clip(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

fn clamp_index(v: i64, n: usize) -> usize {
    v.clamp(0, n as i64 - 1) as usize
}

/// Samples of one channel as f64.
fn channel(img: &ImageBuffer, ch: usize) -> Vec<f64> {
    let (w, h) = img.dimensions();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            out.push(img.get(x, y, ch) as f64);
        }
    }
    out
}

/// BT.601 luma rounded to the nearest level.
pub fn luma(img: &ImageBuffer) -> Vec<f64> {
    let (w, h) = img.dimensions();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let v = match img.channels() {
                Channels::Gray => img.get(x, y, 0) as f64,
                Channels::Rgb => {
                    let k = 299 * img.get(x, y, 0) as u32 + 587 * img.get(x, y, 1) as u32 + 114 * img.get(x, y, 2) as u32;
                    (k as f64 / 1000.0 + 0.5).floor()
                }
            };
            out.push(v);
        }
    }
    out
}

fn assemble(w: usize, h: usize, planes: &[Vec<f64>]) -> ImageBuffer {
    let channels = if planes.len() == 1 { Channels::Gray } else { Channels::Rgb };
    ImageBuffer::from_fn(w, h, channels, |x, y, c| round_clip(planes[c][y * w + x])).unwrap()
}

fn per_channel(img: &ImageBuffer, f: impl Fn(&[f64], usize, usize) -> Vec<f64>) -> ImageBuffer {
    let (w, h) = img.dimensions();
    let planes: Vec<Vec<f64>> = (0..img.channel_count()).map(|c| f(&channel(img, c), w, h)).collect();
    assemble(w, h, &planes)
}

/// Dense 2-D Gaussian with radius `ceil(3σ)` and clamp-to-edge borders.
pub fn blur(u: &[f64], w: usize, h: usize, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil().max(1.0) as i64;
    let g: Vec<f64> = (-r..=r).map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = g.iter().sum();
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for dy in -r..=r {
                for dx in -r..=r {
                    let sx = clamp_index(x as i64 + dx, w);
                    let sy = clamp_index(y as i64 + dy, h);
                    acc += g[(dx + r) as usize] * g[(dy + r) as usize] * u[sy * w + sx];
                }
            }
            out[y * w + x] = acc / (norm * norm);
        }
    }
    out
}

pub fn gaussian(img: &ImageBuffer, sigma: f64) -> ImageBuffer {
    per_channel(img, |u, w, h| blur(u, w, h, sigma))
}

pub fn sobel(img: &ImageBuffer) -> ImageBuffer {
    let (w, h) = img.dimensions();
    let l = luma(img);
    let at = |x: i64, y: i64| l[clamp_index(y, h) * w + clamp_index(x, w)];
    let mut out = vec![0.0; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for d in -1..=1i64 {
                let wgt = if d == 0 { 2.0 } else { 1.0 };
                gx += wgt * (at(x + 1, y + d) - at(x - 1, y + d));
                gy += wgt * (at(x + d, y + 1) - at(x + d, y - 1));
            }
            out[y as usize * w + x as usize] = (gx * gx + gy * gy).sqrt();
        }
    }
    assemble(w, h, &[out])
}

pub fn xdog(img: &ImageBuffer, sigma: f64, p: f64) -> ImageBuffer {
    let (w, h) = img.dimensions();
    let l = luma(img);
    let narrow = blur(&l, w, h, sigma);
    let wide = blur(&l, w, h, 1.6 * sigma);
    let out: Vec<f64> = narrow.iter().zip(&wide).map(|(n, v)| (1.0 + p) * n - p * v).collect();
    assemble(w, h, &[out])
}

/// Explicit total variation flow with forward differences, zero flux across
/// the border and unrounded state between iterations.
pub fn tvf(img: &ImageBuffer, iterations: u32, dt: f64, eps: f64) -> ImageBuffer {
    per_channel(img, |u0, w, h| {
        let mut u = u0.to_vec();
        for _ in 0..iterations {
            let mut px = vec![0.0; w * h];
            let mut py = vec![0.0; w * h];
            for y in 0..h {
                for x in 0..w {
                    let i = y * w + x;
                    let ux = if x + 1 < w { u[i + 1] - u[i] } else { 0.0 };
                    let uy = if y + 1 < h { u[i + w] - u[i] } else { 0.0 };
                    let n = (ux * ux + uy * uy + eps * eps).sqrt();
                    px[i] = ux / n;
                    py[i] = uy / n;
                }
            }
            let mut next = u.clone();
            for y in 0..h {
                for x in 0..w {
                    let i = y * w + x;
                    let west = if x > 0 { px[i - 1] } else { 0.0 };
                    let north = if y > 0 { py[i - w] } else { 0.0 };
                    next[i] = u[i] + dt * (px[i] - west + py[i] - north);
                }
            }
            u = next;
        }
        u
    })
}

/// Tangent field refinement followed by streamline smoothing, all in f64.
///
/// Tangents are Sobel gradients rotated 90° (flat pixels point along +x),
/// refined over a disk with the magnitude term `(1 + tanh(m(y) − m(x)))/2`
/// and the signed alignment `t(x)·t(y)`; neighbors outside the image are
/// skipped. Streamlines take unit steps for `radius` samples each way, read
/// the field at the nearest pixel and the image bilinearly, and stop at the
/// border.
pub fn etf(img: &ImageBuffer, radius: usize, iterations: u32) -> ImageBuffer {
    let (w, h) = img.dimensions();
    let l = luma(img);
    let at = |x: i64, y: i64| l[clamp_index(y, h) * w + clamp_index(x, w)];
    let n = w * h;
    let (mut tx, mut ty, mut mag) = (vec![1.0; n], vec![0.0; n], vec![0.0; n]);
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let mut gx = 0.0;
            let mut gy = 0.0;
            for d in -1..=1i64 {
                let wgt = if d == 0 { 2.0 } else { 1.0 };
                gx += wgt * (at(x + 1, y + d) - at(x - 1, y + d));
                gy += wgt * (at(x + d, y + 1) - at(x + d, y - 1));
            }
            let i = y as usize * w + x as usize;
            let m = (gx * gx + gy * gy).sqrt();
            mag[i] = m;
            if m > 0.0 {
                tx[i] = -gy / m;
                ty[i] = gx / m;
            }
        }
    }
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        mag.iter_mut().for_each(|m| *m /= max);
    }

    let r = radius as i64;
    for _ in 0..iterations {
        let (mut nx, mut ny) = (vec![1.0; n], vec![0.0; n]);
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let i = y as usize * w + x as usize;
                let (mut sx, mut sy) = (0.0, 0.0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        let (qx, qy) = (x + dx, y + dy);
                        if dx * dx + dy * dy > r * r || qx < 0 || qy < 0 || qx >= w as i64 || qy >= h as i64 {
                            continue;
                        }
                        let j = qy as usize * w + qx as usize;
                        let wm = (1.0 + (mag[j] - mag[i]).tanh()) / 2.0;
                        let k = wm * (tx[i] * tx[j] + ty[i] * ty[j]);
                        sx += k * tx[j];
                        sy += k * ty[j];
                    }
                }
                let norm = (sx * sx + sy * sy).sqrt();
                if norm > 1e-12 {
                    nx[i] = sx / norm;
                    ny[i] = sy / norm;
                }
            }
        }
        tx = nx;
        ty = ny;
    }

    let sigma = (radius as f64 / 2.0).max(0.5);
    let weight = |s: usize| (-((s * s) as f64) / (2.0 * sigma * sigma)).exp();
    let planes: Vec<Vec<f64>> = (0..img.channel_count()).map(|c| channel(img, c)).collect();
    let bilinear = |u: &[f64], x: f64, y: f64| {
        let (x0, y0) = (x.floor() as usize, y.floor() as usize);
        let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
        let (fx, fy) = (x - x0 as f64, y - y0 as f64);
        let top = u[y0 * w + x0] * (1.0 - fx) + u[y0 * w + x1] * fx;
        let bottom = u[y1 * w + x0] * (1.0 - fx) + u[y1 * w + x1] * fx;
        top * (1.0 - fy) + bottom * fy
    };
    let out: Vec<Vec<f64>> = planes
        .iter()
        .map(|u| {
            let mut out = vec![0.0; n];
            for y in 0..h {
                for x in 0..w {
                    let i = y * w + x;
                    let (mut acc, mut wsum) = (weight(0) * u[i], weight(0));
                    for sign in [1.0, -1.0] {
                        let (mut px, mut py) = (x as f64, y as f64);
                        let (mut dx, mut dy) = (sign * tx[i], sign * ty[i]);
                        for s in 1..=radius {
                            let (qx, qy) = (px + dx, py + dy);
                            if qx < 0.0 || qy < 0.0 || qx > (w - 1) as f64 || qy > (h - 1) as f64 {
                                break;
                            }
                            px = qx;
                            py = qy;
                            acc += weight(s) * bilinear(u, qx, qy);
                            wsum += weight(s);
                            let j = (qy + 0.5).floor() as usize * w + (qx + 0.5).floor() as usize;
                            let flip = if tx[j] * dx + ty[j] * dy < 0.0 { -1.0 } else { 1.0 };
                            dx = flip * tx[j];
                            dy = flip * ty[j];
                        }
                    }
                    out[i] = acc / wsum;
                }
            }
            out
        })
        .collect();
    assemble(w, h, &out)
}

/// Bilateral base (spatial σ 3, range σ 25, disk radius 9) plus the scaled residual.
pub fn detail_control(img: &ImageBuffer, delta: f64) -> ImageBuffer {
    let (ss, sr, r) = (3.0f64, 25.0f64, 9i64);
    let gain = 1.0 + delta / 100.0;
    per_channel(img, |u, w, h| {
        let mut out = vec![0.0; w * h];
        for y in 0..h as i64 {
            for x in 0..w as i64 {
                let c = u[y as usize * w + x as usize];
                let (mut sw, mut sv) = (0.0, 0.0);
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx * dx + dy * dy > r * r {
                            continue;
                        }
                        let n = u[clamp_index(y + dy, h) * w + clamp_index(x + dx, w)];
                        let wt = (-((dx * dx + dy * dy) as f64) / (2.0 * ss * ss)).exp()
                            * (-(n - c) * (n - c) / (2.0 * sr * sr)).exp();
                        sw += wt;
                        sv += wt * n;
                    }
                }
                let base = sv / sw;
                out[y as usize * w + x as usize] = base + gain * (c - base);
            }
        }
        out
    })
}

pub fn soft_threshold(img: &ImageBuffer, phi: f64, epsilon: f64) -> ImageBuffer {
    per_channel(img, |u, _, _| {
        u.iter()
            .map(|&v| 255.0 * (1.0 + (phi * (v - epsilon)).min(0.0).tanh()))
            .collect()
    })
}

/// Nearest of `levels` evenly spaced tones, ties toward the brighter one.
pub fn posterize(img: &ImageBuffer, levels: u32) -> ImageBuffer {
    let steps = (levels - 1) as f64;
    per_channel(img, |u, _, _| {
        u.iter()
            .map(|&v| (v * steps / 255.0 + 0.5).floor() * 255.0 / steps)
            .collect()
    })
}

/// Largest per-sample absolute difference; images must have equal shapes.
pub fn max_abs_diff(a: &ImageBuffer, b: &ImageBuffer) -> u8 {
    assert_eq!(a.dimensions(), b.dimensions(), "dimensions differ");
    assert_eq!(a.channels(), b.channels(), "channel counts differ");
    a.data().iter().zip(b.data()).map(|(x, y)| x.abs_diff(*y)).max().unwrap_or(0)
}
