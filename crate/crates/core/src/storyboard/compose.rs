//! Page assembly: frames are framed, resampled and stylized per panel, then
//! pasted onto a white page with black borders.

use rayon::prelude::*;

use super::framing::{best_crop, candidate_crops, fallback_region, primary_box, DetectionBox, PixelRect};
use super::layout::{LayoutTemplate, PanelPixels};
use crate::error::{Error, Result};
use crate::imaging::{resize, Channels, ImageBuffer};
use crate::pipeline::{execute, StylePipeline};
use crate::procedural::StyleRng;

pub const MIN_PAGE_WIDTH: usize = 320;

/// An input image with the detections known for it, in temporal order.
#[derive(Debug, Clone)]
pub struct Frame {
    pub id: String,
    pub image: ImageBuffer,
    pub detections: Vec<DetectionBox>,
}

impl Frame {
    pub fn new(id: impl Into<String>, image: ImageBuffer) -> Self {
        Self {
            id: id.into(),
            image,
            detections: Vec::new(),
        }
    }

    /// The detection used for framing, or the gradient-energy fallback.
    pub fn subject(&self) -> DetectionBox {
        primary_box(&self.detections)
            .cloned()
            .unwrap_or_else(|| fallback_region(&self.image, &self.id))
    }
}

/// Which frames fill a page: `demand` indices out of `n`, increasing, drawn
/// with `seed`. All frames are used, in order, when `n == demand`.
pub fn assign_frames(n: usize, demand: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if demand < n {
        StyleRng::new(seed).shuffle(&mut idx);
        idx.truncate(demand);
        idx.sort_unstable();
    }
    idx
}

/// Crops `frame` to the aspect of `target` and resamples it to that size.
pub fn frame_panel(frame: &Frame, target: PixelRect) -> Result<ImageBuffer> {
    let (w, h) = frame.image.dimensions();
    let candidates = candidate_crops(&frame.subject(), w, h);
    let crop = best_crop(&candidates, target.aspect(), w, h)?.rect;
    let cropped = frame.image.crop(crop.x, crop.y, crop.w, crop.h)?;
    resize(&cropped.to_rgb(), target.w, target.h)
}

fn paint_border(page: &mut ImageBuffer, r: PixelRect, border: usize) {
    let b = border.min(r.w / 2).min(r.h / 2);
    for y in r.y..r.bottom() {
        for x in r.x..r.right() {
            let edge = x < r.x + b || x >= r.right() - b || y < r.y + b || y >= r.bottom() - b;
            if edge {
                for c in 0..3 {
                    page.set(x, y, c, 0);
                }
            }
        }
    }
}

/// Renders one page. Slots (single panels or merge groups) are filled in
/// reading order with the assigned frames in temporal order; a merge group
/// shows one image across all of its panels.
pub fn compose(
    frames: &[Frame],
    layout: &LayoutTemplate,
    style: &StylePipeline,
    page_w: usize,
    assignment_seed: u64,
) -> Result<ImageBuffer> {
    if page_w < MIN_PAGE_WIDTH {
        return Err(Error::invalid(format!(
            "page width must be at least {MIN_PAGE_WIDTH}, got {page_w}"
        )));
    }
    layout.validate()?;
    let demand = layout.demand();
    if frames.len() < demand {
        return Err(Error::Layout {
            id: layout.id.clone(),
            message: format!("needs {demand} images, got {}", frames.len()),
        });
    }
    let slots = layout.slots();
    let pixels = layout.panel_pixels(page_w)?;
    let assigned = assign_frames(frames.len(), demand, assignment_seed);

    let slot_rect = |panels: &[usize]| -> PixelRect {
        panels[1..]
            .iter()
            .fold(pixels[panels[0]].rect, |acc, &i| acc.union(&pixels[i].rect))
    };
    let rendered: Vec<ImageBuffer> = slots
        .par_iter()
        .zip(&assigned)
        .map(|(slot, &fi)| {
            let area = slot_rect(&slot.panels);
            execute(style, &frame_panel(&frames[fi], area)?)
        })
        .collect::<Result<_>>()?;

    let (pw, ph) = layout.page_size(page_w);
    let mut page = ImageBuffer::filled(pw, ph, Channels::Rgb, 255)?;
    for (slot, img) in slots.iter().zip(&rendered) {
        let area = slot_rect(&slot.panels);
        for &pi in &slot.panels {
            let PanelPixels { rect, border } = pixels[pi];
            for y in rect.y..rect.bottom() {
                for x in rect.x..rect.right() {
                    for c in 0..3 {
                        page.set(x, y, c, img.get(x - area.x, y - area.y, c));
                    }
                }
            }
            paint_border(&mut page, rect, border);
        }
    }
    Ok(page)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::storyboard::layout::{bundled_layouts, parse_layouts};

    fn frame(i: usize) -> Frame {
        let v = (i * 40 + 20) as u8;
        Frame::new(format!("f{i}"), ImageBuffer::filled(64, 48, Channels::Rgb, v).unwrap())
    }

    fn layout(id: &str) -> LayoutTemplate {
        bundled_layouts().into_iter().find(|t| t.id == id).unwrap()
    }

    #[test]
    fn single_panel_is_full_bleed_with_border() {
        let t = parse_layouts(
            r#"{"id":"one","page_aspect":[4,3],"gutter":0,"panels":[{"id":"p","rect":[0,0,1,1],"border_width":0.01}]}"#,
        )
        .unwrap()
        .remove(0);
        let page = compose(&[frame(2)], &t, &StylePipeline::new("id"), 400, 1).unwrap();
        assert_eq!(page.dimensions(), (400, 300));
        assert_eq!(page.pixel(0, 0), [0, 0, 0]);
        assert_eq!(page.pixel(3, 3), [0, 0, 0]);
        assert_eq!(page.pixel(200, 150), [100, 100, 100]);
    }

    #[test]
    fn grid_is_filled_in_reading_order() {
        let t = layout("grid-2x2");
        let frames: Vec<Frame> = (0..4).map(frame).collect();
        let page = compose(&frames, &t, &StylePipeline::new("id"), 640, 7).unwrap();
        let px = t.panel_pixels(640).unwrap();
        for (i, p) in px.iter().enumerate() {
            let (cx, cy) = (p.rect.x + p.rect.w / 2, p.rect.y + p.rect.h / 2);
            assert_eq!(page.get(cx, cy, 0), (i * 40 + 20) as u8);
        }
        // gutters stay white
        assert_eq!(page.pixel(2, 2), [255, 255, 255]);
    }

    #[test]
    fn too_few_frames_rejects_the_layout() {
        let err = compose(&[frame(0)], &layout("grid-2x2"), &StylePipeline::new("id"), 640, 0).unwrap_err();
        assert!(matches!(err, Error::Layout { .. }));
        assert!(compose(&[frame(0)], &layout("single"), &StylePipeline::new("id"), 100, 0).is_err());
    }

    #[test]
    fn assignment_is_increasing_and_seeded() {
        let a = assign_frames(10, 4, 3);
        assert_eq!(a.len(), 4);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(a, assign_frames(10, 4, 3));
        assert_eq!(assign_frames(4, 4, 99), vec![0, 1, 2, 3]);
    }

    #[test]
    fn merged_panels_share_one_image() {
        let t = layout("banner-merged");
        let frames: Vec<Frame> = (0..3).map(frame).collect();
        let page = compose(&frames, &t, &StylePipeline::new("id"), 640, 0).unwrap();
        let px = t.panel_pixels(640).unwrap();
        let center = |i: usize| (px[i].rect.x + px[i].rect.w / 2, px[i].rect.y + px[i].rect.h / 2);
        let v = |i: usize| {
            let (x, y) = center(i);
            page.get(x, y, 0)
        };
        assert_eq!(v(0), 20);
        assert_eq!(v(1), 20);
        assert_eq!(v(2), 60);
        assert_eq!(v(3), 100);
    }
}
