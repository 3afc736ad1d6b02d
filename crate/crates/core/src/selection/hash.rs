use crate::imaging::{luma_image, ImageBuffer};

/// 64-bit perceptual fingerprint built from gradient signs of a 9×9 thumbnail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fingerprint(pub u64);

impl Fingerprint {
    pub fn bits(self) -> u64 {
        self.0
    }

    /// Bit for output row `row` and column `col`, both in `0..8`.
    pub fn bit(self, row: usize, col: usize) -> bool {
        (self.0 >> (63 - (row * 8 + col))) & 1 == 1
    }

    pub fn to_hex(self) -> String {
        format!("{:016x}", self.0)
    }
}

impl std::fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Number of differing bits.
pub fn hamming(a: Fingerprint, b: Fingerprint) -> u32 {
    (a.0 ^ b.0).count_ones()
}

/// Fingerprint of an image.
///
/// The luma is box-averaged onto a 9×9 grid with exact fractional cell
/// weights and kept unrounded, so tiny changes cannot flip a tie.
/// Even rows contribute horizontal differences, odd rows vertical ones
/// (against the row below). A zero difference yields a 0 bit.
pub fn perceptual_hash(img: &ImageBuffer) -> Fingerprint {
    let t = thumbnail(&luma_image(img));
    let mut bits = 0u64;
    for row in 0..8 {
        for col in 0..8 {
            let d = if row % 2 == 0 {
                t[row][col + 1] - t[row][col]
            } else {
                t[row + 1][col] - t[row][col]
            };
            bits = (bits << 1) | u64::from(d > 0.0);
        }
    }
    Fingerprint(bits)
}

/// Overlap of pixel `i` with the cell spanning `[lo, hi)`.
fn overlap(i: usize, lo: f64, hi: f64) -> f64 {
    (hi.min(i as f64 + 1.0) - lo.max(i as f64)).max(0.0)
}

fn thumbnail(gray: &ImageBuffer) -> [[f64; 9]; 9] {
    let (w, h) = gray.dimensions();
    let (sx, sy) = (w as f64 / 9.0, h as f64 / 9.0);
    let mut t = [[0.0; 9]; 9];
    for (ty, row) in t.iter_mut().enumerate() {
        let (y0, y1) = (ty as f64 * sy, (ty + 1) as f64 * sy);
        for (tx, cell) in row.iter_mut().enumerate() {
            let (x0, x1) = (tx as f64 * sx, (tx + 1) as f64 * sx);
            let (mut sum, mut area) = (0.0, 0.0);
            for y in y0.floor() as usize..(y1.ceil() as usize).min(h) {
                let wy = overlap(y, y0, y1);
                for x in x0.floor() as usize..(x1.ceil() as usize).min(w) {
                    let a = wy * overlap(x, x0, x1);
                    sum += a * gray.get(x, y, 0) as f64;
                    area += a;
                }
            }
            *cell = sum / area;
        }
    }
    t
}
