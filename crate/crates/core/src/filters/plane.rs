//! Single-channel f32 working planes used by the heavier filters.

use rayon::prelude::*;

use crate::imaging::{clip_u8, Channels, ImageBuffer};

#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl Plane {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    pub fn from_channel(img: &ImageBuffer, ch: usize) -> Self {
        let c = img.channel_count();
        Self {
            width: img.width(),
            height: img.height(),
            data: img.data().iter().skip(ch).step_by(c).map(|&v| v as f32).collect(),
        }
    }

    pub fn planes(img: &ImageBuffer) -> Vec<Plane> {
        (0..img.channel_count())
            .map(|c| Plane::from_channel(img, c))
            .collect()
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f32 {
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn at_clamped(&self, x: isize, y: isize) -> f32 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.data[y * self.width + x]
    }

    /// Bilinear sample with clamp-to-edge.
    #[inline]
    pub fn sample(&self, x: f32, y: f32) -> f32 {
        let x = x.clamp(0.0, (self.width - 1) as f32);
        let y = y.clamp(0.0, (self.height - 1) as f32);
        let x0 = x as usize; // x >= 0, so truncation is floor
        let y0 = y as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let fx = x - x0 as f32;
        let fy = y - y0 as f32;
        let a = self.at(x0, y0) + (self.at(x1, y0) - self.at(x0, y0)) * fx;
        let b = self.at(x0, y1) + (self.at(x1, y1) - self.at(x0, y1)) * fx;
        a + (b - a) * fy
    }

    /// Copy padded by `pad` pixels of edge replication on every side.
    pub fn padded(&self, pad: usize) -> Plane {
        let pw = self.width + 2 * pad;
        let ph = self.height + 2 * pad;
        let mut data = Vec::with_capacity(pw * ph);
        for py in 0..ph {
            let y = py.saturating_sub(pad).min(self.height - 1);
            let row = &self.data[y * self.width..(y + 1) * self.width];
            data.extend(std::iter::repeat_n(row[0], pad));
            data.extend_from_slice(row);
            data.extend(std::iter::repeat_n(row[self.width - 1], pad));
        }
        Plane {
            width: pw,
            height: ph,
            data,
        }
    }

    pub fn map_rows(&self, f: impl Fn(usize, &mut [f32]) + Sync) -> Plane {
        let mut out = Plane::new(self.width, self.height);
        out.data
            .par_chunks_mut(self.width)
            .enumerate()
            .for_each(|(y, row)| f(y, row));
        out
    }
}

/// Rounds and clips planes back into an interleaved 8-bit image.
pub fn planes_to_image(planes: &[Plane]) -> ImageBuffer {
    let w = planes[0].width;
    let h = planes[0].height;
    let c = planes.len();
    let channels = Channels::from_count(c).expect("one or three planes");
    let mut data = vec![0u8; w * h * c];
    for (ch, p) in planes.iter().enumerate() {
        for (i, &v) in p.data.iter().enumerate() {
            data[i * c + ch] = clip_u8(v);
        }
    }
    ImageBuffer::from_raw(w, h, channels, data).expect("planes share valid dimensions")
}

pub fn plane_to_gray(p: &Plane) -> ImageBuffer {
    planes_to_image(std::slice::from_ref(p))
}
