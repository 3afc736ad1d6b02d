use crate::error::{Error, Result};

/// Sample layout of an [`ImageBuffer`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channels {
    Gray = 1,
    Rgb = 3,
}

impl Channels {
    pub const fn count(self) -> usize {
        self as usize
    }

    pub fn from_count(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Channels::Gray),
            3 => Ok(Channels::Rgb),
            _ => Err(Error::invalid(format!("unsupported channel count {n}"))),
        }
    }
}

/// Owned 8-bit raster, row-major with interleaved channels.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    channels: Channels,
    data: Vec<u8>,
}

impl std::fmt::Debug for ImageBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ImageBuffer")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

impl ImageBuffer {
    /// Zero-filled buffer.
    pub fn new(width: usize, height: usize, channels: Channels) -> Result<Self> {
        Self::filled(width, height, channels, 0)
    }

    pub fn filled(width: usize, height: usize, channels: Channels, value: u8) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            channels,
            data: vec![value; width * height * channels.count()],
        })
    }

    pub fn from_raw(width: usize, height: usize, channels: Channels, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        let expected = width * height * channels.count();
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "buffer holds {} samples, {width}x{height}x{} needs {expected}",
                data.len(),
                channels.count()
            )));
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    /// Builds a buffer by evaluating `f(x, y, channel)` for every sample.
    pub fn from_fn(
        width: usize,
        height: usize,
        channels: Channels,
        mut f: impl FnMut(usize, usize, usize) -> u8,
    ) -> Result<Self> {
        check_dims(width, height)?;
        let c = channels.count();
        let mut data = Vec::with_capacity(width * height * c);
        for y in 0..height {
            for x in 0..width {
                for ch in 0..c {
                    data.push(f(x, y, ch));
                }
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> Channels {
        self.channels
    }

    #[inline]
    pub fn channel_count(&self) -> usize {
        self.channels.count()
    }

    pub fn dimensions(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, ch: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels.count() + ch]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, ch: usize, v: u8) {
        let c = self.channels.count();
        self.data[(y * self.width + x) * c + ch] = v;
    }

    /// Sample with clamp-to-edge addressing.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize, ch: usize) -> u8 {
        let x = x.clamp(0, self.width as isize - 1) as usize;
        let y = y.clamp(0, self.height as isize - 1) as usize;
        self.get(x, y, ch)
    }

    pub fn pixel(&self, x: usize, y: usize) -> &[u8] {
        let c = self.channels.count();
        let i = (y * self.width + x) * c;
        &self.data[i..i + c]
    }

    pub fn row(&self, y: usize) -> &[u8] {
        let stride = self.width * self.channels.count();
        &self.data[y * stride..(y + 1) * stride]
    }

    /// Extracts one channel as a single-channel image.
    pub fn channel(&self, ch: usize) -> ImageBuffer {
        let c = self.channels.count();
        let data = self.data.iter().skip(ch).step_by(c).copied().collect();
        ImageBuffer {
            width: self.width,
            height: self.height,
            channels: Channels::Gray,
            data,
        }
    }

    /// Interleaves single-channel planes into one buffer.
    pub fn from_planes(planes: &[ImageBuffer]) -> Result<Self> {
        let first = planes
            .first()
            .ok_or_else(|| Error::invalid("no planes to merge"))?;
        let channels = Channels::from_count(planes.len())?;
        if planes
            .iter()
            .any(|p| p.dimensions() != first.dimensions() || p.channels != Channels::Gray)
        {
            return Err(Error::invalid("planes must be single-channel with equal dimensions"));
        }
        let n = first.pixel_count();
        let c = planes.len();
        let mut data = vec![0u8; n * c];
        for (ch, plane) in planes.iter().enumerate() {
            for (i, &v) in plane.data.iter().enumerate() {
                data[i * c + ch] = v;
            }
        }
        Ok(ImageBuffer {
            width: first.width,
            height: first.height,
            channels,
            data,
        })
    }

    /// Replicates a gray image into three channels; RGB input is returned as is.
    pub fn to_rgb(&self) -> ImageBuffer {
        match self.channels {
            Channels::Rgb => self.clone(),
            Channels::Gray => ImageBuffer {
                width: self.width,
                height: self.height,
                channels: Channels::Rgb,
                data: self.data.iter().flat_map(|&v| [v, v, v]).collect(),
            },
        }
    }

    /// Applies `f` to every sample.
    pub fn map_samples(&self, f: impl Fn(u8) -> u8) -> ImageBuffer {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v = f(*v));
        out
    }

    /// Copies the `w`×`h` region at (`x`,`y`).
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<ImageBuffer> {
        check_dims(w, h)?;
        if x + w > self.width || y + h > self.height {
            return Err(Error::invalid(format!(
                "crop ({x},{y},{w},{h}) exceeds {}x{}",
                self.width, self.height
            )));
        }
        let c = self.channels.count();
        let mut data = Vec::with_capacity(w * h * c);
        for row in y..y + h {
            let start = (row * self.width + x) * c;
            data.extend_from_slice(&self.data[start..start + w * c]);
        }
        Ok(ImageBuffer {
            width: w,
            height: h,
            channels: self.channels,
            data,
        })
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as u64).sum::<u64>() as f64 / self.data.len() as f64
    }
}

fn check_dims(width: usize, height: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::invalid(format!(
            "image dimensions must be at least 1x1, got {width}x{height}"
        )));
    }
    Ok(())
}

/// Rounds half up and clips to the 8-bit range.
#[inline]
pub fn clip_u8(v: f32) -> u8 {
    let r = (v + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// f64 variant of [`clip_u8`].
#[inline]
pub fn clip_u8_f64(v: f64) -> u8 {
    let r = (v + 0.5).floor();
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}
