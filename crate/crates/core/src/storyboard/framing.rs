//! Detection-driven framing: crop suggestions around a box and the pick that
//! best fits a panel.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::sobel;
use crate::imaging::ImageBuffer;

/// Published JSON schema for detection sidecars.
pub const DETECTIONS_SCHEMA: &str = include_str!("../../assets/schemas/detections.schema.json");

/// Margin added on every side by the first crop candidate.
pub const CROP_MARGIN: usize = 20;

/// Side of the fallback window as a fraction of the smaller image dimension.
pub const FALLBACK_FRACTION: f64 = 0.4;

pub const FALLBACK_CONFIDENCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelRect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl PixelRect {
    pub const fn new(x: usize, y: usize, w: usize, h: usize) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> usize {
        self.x + self.w
    }

    pub fn bottom(&self) -> usize {
        self.y + self.h
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn aspect(&self) -> f64 {
        self.w as f64 / self.h as f64
    }

    pub fn contains(&self, other: &PixelRect) -> bool {
        other.x >= self.x && other.y >= self.y && other.right() <= self.right() && other.bottom() <= self.bottom()
    }

    pub fn within(&self, width: usize, height: usize) -> bool {
        self.w > 0 && self.h > 0 && self.right() <= width && self.bottom() <= height
    }

    /// Bounding box of both rectangles.
    pub fn union(&self, other: &PixelRect) -> PixelRect {
        let x = self.x.min(other.x);
        let y = self.y.min(other.y);
        PixelRect::new(x, y, self.right().max(other.right()) - x, self.bottom().max(other.bottom()) - y)
    }

    /// Signed-bounds rectangle intersected with `[0,width)×[0,height)`.
    fn clamped(x0: i64, y0: i64, x1: i64, y1: i64, width: usize, height: usize) -> PixelRect {
        let cx0 = x0.clamp(0, width as i64) as usize;
        let cy0 = y0.clamp(0, height as i64) as usize;
        let cx1 = x1.clamp(0, width as i64) as usize;
        let cy1 = y1.clamp(0, height as i64) as usize;
        PixelRect::new(cx0, cy0, cx1 - cx0, cy1 - cy0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectionKind {
    Face,
    Object,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionBox {
    pub image_id: String,
    pub rect: PixelRect,
    pub kind: DetectionKind,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SidecarBox {
    x: usize,
    y: usize,
    w: usize,
    h: usize,
    kind: DetectionKind,
    confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    image_id: String,
    boxes: Vec<SidecarBox>,
}

/// Parses a detections sidecar and checks every box against the image size.
pub fn parse_detections(text: &str, width: usize, height: usize) -> Result<Vec<DetectionBox>> {
    let doc: Sidecar = serde_json::from_str(text).map_err(|e| Error::parse("detections", e.to_string()))?;
    doc.boxes
        .into_iter()
        .enumerate()
        .map(|(i, b)| {
            let rect = PixelRect::new(b.x, b.y, b.w, b.h);
            if !rect.within(width, height) {
                return Err(Error::parse(
                    format!("detections.boxes[{i}]"),
                    format!("box {rect:?} is not inside the {width}x{height} image"),
                ));
            }
            if !(0.0..=1.0).contains(&b.confidence) {
                return Err(Error::parse(
                    format!("detections.boxes[{i}]"),
                    format!("confidence {} outside [0,1]", b.confidence),
                ));
            }
            Ok(DetectionBox {
                image_id: doc.image_id.clone(),
                rect,
                kind: b.kind,
                confidence: b.confidence,
            })
        })
        .collect()
}

/// Serializes boxes of one image in sidecar form.
pub fn detections_to_json(image_id: &str, boxes: &[DetectionBox]) -> String {
    let doc = Sidecar {
        image_id: image_id.to_string(),
        boxes: boxes
            .iter()
            .map(|b| SidecarBox {
                x: b.rect.x,
                y: b.rect.y,
                w: b.rect.w,
                h: b.rect.h,
                kind: b.kind,
                confidence: b.confidence,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("sidecar serializes")
}

/// The box framing is built around: highest confidence, then larger area,
/// then the first listed.
pub fn primary_box(boxes: &[DetectionBox]) -> Option<&DetectionBox> {
    boxes.iter().reduce(|best, b| {
        let better = b.confidence > best.confidence
            || (b.confidence == best.confidence && b.rect.area() > best.rect.area());
        if better {
            b
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CropCandidate {
    pub rect: PixelRect,
    /// The box the crop was grown from; `None` for a whole-image crop.
    pub source: Option<DetectionBox>,
}

impl CropCandidate {
    pub fn whole_image(width: usize, height: usize) -> Self {
        Self {
            rect: PixelRect::new(0, 0, width, height),
            source: None,
        }
    }
}

/// `[start, end)` of a span of `len` grown by `factor` about its center.
fn grow(start: usize, len: usize, factor: f64) -> (i64, i64) {
    let new_len = (len as f64 * factor).round() as i64;
    let s = start as i64 - (new_len - len as i64) / 2;
    (s, s + new_len)
}

/// Crop suggestions around `det`, in a fixed order, clamped to the image and
/// deduplicated: a 20 px margin, height/width/both grown by 10% and by 50%,
/// full height, full width and the whole image.
pub fn candidate_crops(det: &DetectionBox, width: usize, height: usize) -> Vec<CropCandidate> {
    let b = det.rect;
    let (bx0, by0) = (b.x as i64, b.y as i64);
    let (bx1, by1) = (b.right() as i64, b.bottom() as i64);
    let m = CROP_MARGIN as i64;
    let mut rects = vec![PixelRect::clamped(bx0 - m, by0 - m, bx1 + m, by1 + m, width, height)];
    for factor in [1.1, 1.5] {
        let (gx0, gx1) = grow(b.x, b.w, factor);
        let (gy0, gy1) = grow(b.y, b.h, factor);
        rects.push(PixelRect::clamped(bx0, gy0, bx1, gy1, width, height));
        rects.push(PixelRect::clamped(gx0, by0, gx1, by1, width, height));
        rects.push(PixelRect::clamped(gx0, gy0, gx1, gy1, width, height));
    }
    rects.push(PixelRect::new(b.x, 0, b.w, height));
    rects.push(PixelRect::new(0, b.y, width, b.h));
    rects.push(PixelRect::new(0, 0, width, height));

    let mut out: Vec<CropCandidate> = Vec::with_capacity(rects.len());
    for rect in rects {
        if !out.iter().any(|c| c.rect == rect) {
            out.push(CropCandidate {
                rect,
                source: Some(det.clone()),
            });
        }
    }
    out
}

/// Start of a window of `len` inside `[0, size)` that is as close as possible
/// to centered on `center` while covering `[keep0, keep1)` when that fits.
fn place(center: f64, len: usize, keep0: usize, keep1: usize, size: usize) -> usize {
    let mut s = (center - len as f64 / 2.0).round().max(0.0) as usize;
    if keep1 - keep0 <= len {
        s = s.min(keep0).max(keep1.saturating_sub(len));
    }
    s.min(size - len)
}

/// Grows or trims `rect` along one axis so its aspect equals `target`.
fn fit_aspect(rect: PixelRect, keep: PixelRect, target: f64, width: usize, height: usize) -> PixelRect {
    let cx = rect.x as f64 + rect.w as f64 / 2.0;
    let cy = rect.y as f64 + rect.h as f64 / 2.0;
    if rect.aspect() < target {
        let w = ((rect.h as f64 * target).round() as usize).max(1);
        if w <= width {
            let x = place(cx, w, keep.x, keep.right(), width);
            PixelRect::new(x, rect.y, w, rect.h)
        } else {
            // too wide for the image: use the full width and trim the height
            let h = ((width as f64 / target).round() as usize).clamp(1, height);
            let y = place(cy, h, keep.y, keep.bottom(), height);
            PixelRect::new(0, y, width, h)
        }
    } else {
        let h = ((rect.w as f64 / target).round() as usize).max(1);
        if h <= height {
            let y = place(cy, h, keep.y, keep.bottom(), height);
            PixelRect::new(rect.x, y, rect.w, h)
        } else {
            let w = ((height as f64 * target).round() as usize).clamp(1, width);
            let x = place(cx, w, keep.x, keep.right(), width);
            PixelRect::new(x, 0, w, height)
        }
    }
}

/// The candidate whose aspect is closest to `target_aspect` in log space
/// (ties go to the larger area, then the earlier candidate), widened or
/// heightened about its center to match the target exactly. When the image is
/// too small for that, the crop spans the image along one axis and is trimmed
/// along the other, keeping the source box inside whenever it fits.
pub fn best_crop(
    candidates: &[CropCandidate],
    target_aspect: f64,
    width: usize,
    height: usize,
) -> Result<CropCandidate> {
    if !(target_aspect.is_finite() && target_aspect > 0.0) {
        return Err(Error::invalid(format!("target aspect must be positive, got {target_aspect}")));
    }
    let target_log = target_aspect.ln();
    let mut best: Option<(&CropCandidate, f64)> = None;
    for c in candidates {
        if !c.rect.within(width, height) {
            return Err(Error::invalid(format!("candidate {:?} is outside the image", c.rect)));
        }
        let d = (c.rect.aspect().ln() - target_log).abs();
        let better = match best {
            None => true,
            Some((b, bd)) => d < bd || (d == bd && c.rect.area() > b.rect.area()),
        };
        if better {
            best = Some((c, d));
        }
    }
    let (winner, _) = best.ok_or_else(|| Error::invalid("best_crop needs at least one candidate"))?;
    let keep = winner.source.as_ref().map_or(
        {
            // no box: keep the center pixel of the crop
            let r = winner.rect;
            PixelRect::new(r.x + r.w / 2, r.y + r.h / 2, 1, 1)
        },
        |b| b.rect,
    );
    Ok(CropCandidate {
        rect: fit_aspect(winner.rect, keep, target_aspect, width, height),
        source: winner.source.clone(),
    })
}

/// Square window of side 40% of the smaller dimension with the largest mean
/// Sobel magnitude, found with an integral image. Ties go to the window whose
/// center is nearest the image center, then to the first in scan order.
pub fn fallback_region(img: &ImageBuffer, image_id: &str) -> DetectionBox {
    let (w, h) = img.dimensions();
    let side = ((w.min(h) as f64 * FALLBACK_FRACTION).round() as usize).clamp(1, w.min(h));
    let edges = sobel(img);
    let stride = w + 1;
    let mut integral = vec![0u64; stride * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0u64;
        for x in 0..w {
            row_sum += edges.get(x, y, 0) as u64;
            integral[(y + 1) * stride + x + 1] = integral[y * stride + x + 1] + row_sum;
        }
    }
    let window = |x: usize, y: usize| {
        integral[(y + side) * stride + x + side] + integral[y * stride + x]
            - integral[y * stride + x + side]
            - integral[(y + side) * stride + x]
    };
    // doubled coordinates keep the center distance integral
    let center_dist = |x: usize, y: usize| {
        let dx = (2 * x + side) as i64 - w as i64;
        let dy = (2 * y + side) as i64 - h as i64;
        dx * dx + dy * dy
    };
    let mut best = (0usize, 0usize);
    let mut best_key = (window(0, 0), -center_dist(0, 0));
    for y in 0..=h - side {
        for x in 0..=w - side {
            let key = (window(x, y), -center_dist(x, y));
            if key > best_key {
                best_key = key;
                best = (x, y);
            }
        }
    }
    DetectionBox {
        image_id: image_id.to_string(),
        rect: PixelRect::new(best.0, best.1, side, side),
        kind: DetectionKind::Object,
        confidence: FALLBACK_CONFIDENCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::Channels;

    fn det(x: usize, y: usize, w: usize, h: usize) -> DetectionBox {
        DetectionBox {
            image_id: "i".into(),
            rect: PixelRect::new(x, y, w, h),
            kind: DetectionKind::Face,
            confidence: 0.9,
        }
    }

    #[test]
    fn margin_candidate_matches_hand_arithmetic() {
        let c = candidate_crops(&det(450, 450, 100, 100), 1000, 1000);
        assert_eq!(c.len(), 10);
        assert_eq!(c[0].rect, PixelRect::new(430, 430, 140, 140));
        // height ×1.1: 110 tall, 5 px above
        assert_eq!(c[1].rect, PixelRect::new(450, 445, 100, 110));
        assert_eq!(c[6].rect, PixelRect::new(425, 425, 150, 150));
        assert_eq!(c[9].rect, PixelRect::new(0, 0, 1000, 1000));
    }

    #[test]
    fn full_image_box_collapses_to_one() {
        let c = candidate_crops(&det(0, 0, 64, 48), 64, 48);
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].rect, PixelRect::new(0, 0, 64, 48));
    }

    #[test]
    fn picks_nearest_aspect_in_log_space() {
        let cand = |w, h| CropCandidate {
            rect: PixelRect::new(0, 0, w, h),
            source: None,
        };
        let c = [cand(100, 100), cand(205, 100), cand(100, 200)];
        let best = best_crop(&c, 2.0, 400, 400).unwrap();
        assert_eq!((best.rect.w, best.rect.h), (205, 103));
    }

    #[test]
    fn ties_prefer_the_larger_crop() {
        let cand = |w, h| CropCandidate {
            rect: PixelRect::new(0, 0, w, h),
            source: None,
        };
        // aspects 0.5 and 2 are equally far from 1 in log space
        let best = best_crop(&[cand(50, 100), cand(300, 150)], 1.0, 400, 400).unwrap();
        assert_eq!(best.rect.h, 300);
    }

    #[test]
    fn trims_when_the_image_is_too_small() {
        let c = candidate_crops(&det(40, 10, 20, 20), 100, 50);
        let best = best_crop(&c, 4.0, 100, 50).unwrap();
        assert_eq!((best.rect.w, best.rect.h), (100, 25));
        assert!(best.rect.contains(&PixelRect::new(40, 10, 20, 20)));
    }

    #[test]
    fn sidecar_round_trips_and_checks_bounds() {
        let boxes = vec![det(1, 2, 3, 4)];
        let text = detections_to_json("i", &boxes);
        assert_eq!(parse_detections(&text, 10, 10).unwrap(), boxes);
        assert!(parse_detections(&text, 3, 10).is_err());
        assert!(parse_detections(r#"{"image_id":"i","boxes":[{"x":0,"y":0,"w":1,"h":1,"kind":"cat","confidence":1}]}"#, 5, 5).is_err());
    }

    #[test]
    fn primary_box_prefers_confidence_then_area() {
        let mut a = det(0, 0, 5, 5);
        let mut b = det(0, 0, 8, 8);
        a.confidence = 0.8;
        b.confidence = 0.8;
        assert_eq!(primary_box(&[a.clone(), b.clone()]).unwrap().rect.w, 8);
        a.confidence = 0.9;
        assert_eq!(primary_box(&[a, b]).unwrap().rect.w, 5);
        assert!(primary_box(&[]).is_none());
    }

    #[test]
    fn fallback_centers_on_flat_images() {
        let img = ImageBuffer::filled(100, 60, Channels::Rgb, 90).unwrap();
        let b = fallback_region(&img, "flat");
        assert_eq!(b.rect, PixelRect::new(38, 18, 24, 24));
        assert_eq!(b.kind, DetectionKind::Object);
        assert_eq!(b.confidence, 0.5);
    }

    #[test]
    fn fallback_finds_a_blob() {
        let img = ImageBuffer::from_fn(120, 80, Channels::Gray, |x, y, _| {
            let (dx, dy) = (x as i64 - 95, y as i64 - 20);
            if dx * dx + dy * dy < 36 {
                250
            } else {
                20
            }
        })
        .unwrap();
        let b = fallback_region(&img, "blob");
        assert!(b.rect.contains(&PixelRect::new(89, 14, 12, 12)), "{:?}", b.rect);
        assert_eq!(fallback_region(&img, "blob"), b);
    }
}
