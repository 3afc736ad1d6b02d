//! Texture substitution: posterized luma levels become hatch tiles.

use super::pixel::posterize_value;
use crate::error::{Error, Result};
use crate::imaging::{on_luma, Channels, ImageBuffer};

/// A binary texture tile; `ink` marks dark samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tile {
    pub width: usize,
    pub height: usize,
    pub ink: Vec<bool>,
}

impl Tile {
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let ink = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Self { width, height, ink }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> bool {
        self.ink[(y % self.height) * self.width + x % self.width]
    }

    pub fn coverage(&self) -> f64 {
        self.ink.iter().filter(|&&i| i).count() as f64 / self.ink.len() as f64
    }
}

/// Eight 8×8 cross-hatch tiles ordered from blank (lightest) to solid (darkest).
pub fn default_tiles() -> Vec<Tile> {
    let d = |x: usize, y: usize, m: usize| (x + y) % m == 0;
    let a = |x: usize, y: usize, m: usize| (x + 8 - y) % m == 0;
    vec![
        Tile::from_fn(8, 8, |_, _| false),
        Tile::from_fn(8, 8, |x, y| d(x, y, 8)),
        Tile::from_fn(8, 8, |x, y| d(x, y, 4)),
        Tile::from_fn(8, 8, |x, y| d(x, y, 4) || a(x, y, 8)),
        Tile::from_fn(8, 8, |x, y| d(x, y, 4) || a(x, y, 4)),
        Tile::from_fn(8, 8, |x, y| d(x, y, 4) || a(x, y, 4) || y % 4 == 2),
        Tile::from_fn(8, 8, |x, y| d(x, y, 2) || y % 4 == 1),
        Tile::from_fn(8, 8, |_, _| true),
    ]
}

/// Posterizes luma to `levels` and paints each level with its tile, repeated
/// every `scale`×tile size pixels. The darkest level gets the last tile and the
/// lightest the first; intermediate levels pick evenly spaced tiles.
pub fn pattern_fill_with(
    img: &ImageBuffer,
    levels: u32,
    tiles: &[Tile],
    scale: usize,
) -> Result<ImageBuffer> {
    if !(2..=8).contains(&levels) {
        return Err(Error::invalid(format!(
            "pattern levels must be in [2,8], got {levels}"
        )));
    }
    if tiles.len() < levels as usize {
        return Err(Error::invalid(format!(
            "{levels} levels need at least {levels} tiles, got {}",
            tiles.len()
        )));
    }
    if scale == 0 {
        return Err(Error::invalid("tile scale must be >= 1"));
    }
    let l1 = (levels - 1) as usize;
    let t1 = tiles.len() - 1;
    // posterized value -> level index (0 = darkest) -> tile
    let tile_for: Vec<usize> = (0..=255u8)
        .map(|v| {
            let level = (posterize_value(v, levels) as usize * l1 + 127) / 255;
            ((l1 - level) * t1 + l1 / 2) / l1
        })
        .collect();
    on_luma(img, |y| {
        let (w, h) = y.dimensions();
        let mut out = ImageBuffer::new(w, h, Channels::Gray)?;
        for py in 0..h {
            for px in 0..w {
                let tile = &tiles[tile_for[y.get(px, py, 0) as usize]];
                let ink = tile.at(px / scale, py / scale);
                out.set(px, py, 0, if ink { 0 } else { 255 });
            }
        }
        Ok(out)
    })
}

pub fn pattern_fill(img: &ImageBuffer, levels: u32, scale: usize) -> Result<ImageBuffer> {
    pattern_fill_with(img, levels, &default_tiles(), scale)
}
