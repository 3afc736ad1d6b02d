//! Deterministic synthetic images: random scenes, noise and a short moving
//! sequence. Used for fixtures, probes and test corpora.

use crate::imaging::{Channels, ImageBuffer};
use crate::procedural::StyleRng;

/// Uniform noise; every sample is independent.
pub fn noise(seed: u64, width: usize, height: usize, channels: Channels) -> ImageBuffer {
    let mut rng = StyleRng::new(seed);
    let n = width * height * channels.count();
    let data = (0..n).map(|_| rng.below(256) as u8).collect();
    ImageBuffer::from_raw(width, height, channels, data).expect("sizes match")
}

#[derive(Debug, Clone, Copy)]
enum ShapeKind {
    Rect,
    Ellipse,
    Stripes(usize),
    Checker(usize),
}

#[derive(Debug, Clone, Copy)]
struct Shape {
    kind: ShapeKind,
    cx: f64,
    cy: f64,
    rx: f64,
    ry: f64,
    color: [u8; 3],
    alt: [u8; 3],
}

impl Shape {
    fn random(rng: &mut StyleRng, w: usize, h: usize) -> Self {
        let (w, h) = (w as f64, h as f64);
        let kind = match rng.below(4) {
            0 => ShapeKind::Rect,
            1 => ShapeKind::Ellipse,
            2 => ShapeKind::Stripes(rng.int(3, 9) as usize),
            _ => ShapeKind::Checker(rng.int(4, 12) as usize),
        };
        let mut color = || [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8];
        let (color, alt) = (color(), color());
        Shape {
            kind,
            cx: rng.real(0.0, w),
            cy: rng.real(0.0, h),
            rx: rng.real(0.08, 0.3) * w,
            ry: rng.real(0.08, 0.3) * h,
            color,
            alt,
        }
    }

    fn color_at(&self, x: f64, y: f64) -> Option<[u8; 3]> {
        let (dx, dy) = ((x - self.cx) / self.rx, (y - self.cy) / self.ry);
        let inside = match self.kind {
            ShapeKind::Ellipse => dx * dx + dy * dy <= 1.0,
            _ => dx.abs() <= 1.0 && dy.abs() <= 1.0,
        };
        if !inside {
            return None;
        }
        let pick_alt = match self.kind {
            ShapeKind::Stripes(p) => ((x + y) as usize / p) % 2 == 1,
            ShapeKind::Checker(p) => ((x as usize / p) + (y as usize / p)) % 2 == 1,
            _ => false,
        };
        Some(if pick_alt { self.alt } else { self.color })
    }
}

#[derive(Debug, Clone)]
struct Scene {
    top: [u8; 3],
    bottom: [u8; 3],
    shapes: Vec<Shape>,
    grain_seed: u64,
}

impl Scene {
    fn random(seed: u64, w: usize, h: usize) -> Self {
        let mut rng = StyleRng::new(seed);
        let mut color = || [rng.below(256) as u8, rng.below(256) as u8, rng.below(256) as u8];
        let (top, bottom) = (color(), color());
        let count = rng.int(6, 10) as usize;
        let shapes = (0..count).map(|_| Shape::random(&mut rng, w, h)).collect();
        Scene {
            top,
            bottom,
            shapes,
            grain_seed: rng.next_u64(),
        }
    }

    /// Renders the scene seen through a window offset by `(ox, oy)`.
    fn render(&self, w: usize, h: usize, ox: f64, oy: f64, extra: &[Shape]) -> ImageBuffer {
        let mut img = ImageBuffer::new(w, h, Channels::Rgb).expect("non-empty");
        for y in 0..h {
            for x in 0..w {
                let (sx, sy) = (x as f64 + ox, y as f64 + oy);
                let t = (sy / h as f64).clamp(0.0, 1.0);
                let mut c = [0u8; 3];
                for (ch, v) in c.iter_mut().enumerate() {
                    *v = (self.top[ch] as f64 * (1.0 - t) + self.bottom[ch] as f64 * t).round() as u8;
                }
                for s in self.shapes.iter().chain(extra) {
                    if let Some(sc) = s.color_at(sx, sy) {
                        c = sc;
                    }
                }
                let g = grain(self.grain_seed, sx as i64, sy as i64);
                for (ch, v) in c.iter().enumerate() {
                    img.set(x, y, ch, (*v as i32 + g).clamp(0, 255) as u8);
                }
            }
        }
        img
    }
}

/// Small fixed film grain in [-6, 6], a hash of the scene position.
fn grain(seed: u64, x: i64, y: i64) -> i32 {
    let mut z = seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (y as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z ^= z >> 31;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 29;
    (z % 13) as i32 - 6
}

/// A random RGB scene: gradient sky, six to nine flat, striped or checkered
/// shapes, and fine grain.
pub fn scene(seed: u64, width: usize, height: usize) -> ImageBuffer {
    Scene::random(seed, width, height).render(width, height, 0.0, 0.0, &[])
}

/// `n` scenes with seeds `seed, seed+1, ...`.
pub fn scene_corpus(n: usize, seed: u64, width: usize, height: usize) -> Vec<ImageBuffer> {
    (0..n as u64).map(|i| scene(seed.wrapping_add(i), width, height)).collect()
}

/// Time step of frame `i`; the action pauses between frames 7 and 8.
fn frame_time(i: usize) -> f64 {
    (if i > 7 { i - 1 } else { i }) as f64
}

/// Center and radius of the ball in frame `i` of [`video_frames`], in frame
/// coordinates.
pub fn video_ball(i: usize, width: usize, height: usize) -> (f64, f64, f64) {
    let t = frame_time(i);
    let (w, h) = (width as f64, height as f64);
    (w * (0.1 + 0.05 * t), h * (0.3 + 0.25 * (t * 0.7).sin()) - 2.0 * t, h * 0.16)
}

/// One second per frame of a panning shot with a ball crossing the frame.
/// The action pauses between frames 7 and 8, which are identical.
pub fn video_frames(seed: u64, count: usize, width: usize, height: usize) -> Vec<ImageBuffer> {
    let scene = Scene::random(seed, width, height);
    (0..count)
        .map(|i| {
            let t = frame_time(i);
            let (ox, oy) = (6.0 * t, 2.0 * t);
            let (cx, cy, r) = video_ball(i, width, height);
            let ball = Shape {
                kind: ShapeKind::Ellipse,
                cx: cx + ox,
                cy: cy + oy,
                rx: r,
                ry: r,
                color: [230, 40, 30],
                alt: [230, 40, 30],
            };
            scene.render(width, height, ox, oy, &[ball])
        })
        .collect()
}
