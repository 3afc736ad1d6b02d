//! Layout templates, detection-driven framing and page composition, plus the
//! batch planner shared by the command line and the service.

mod compose;
mod framing;
mod layout;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::imaging::ImageBuffer;
use crate::pipeline::StylePipeline;
use crate::procedural::StyleRng;
use crate::selection::{select, Candidate, SharpnessConfig, DEFAULT_DUPLICATE_THRESHOLD};

pub use compose::{assign_frames, compose, frame_panel, Frame, MIN_PAGE_WIDTH};
pub use framing::{
    best_crop, candidate_crops, detections_to_json, fallback_region, parse_detections, primary_box,
    CropCandidate, DetectionBox, DetectionKind, PixelRect, CROP_MARGIN, DETECTIONS_SCHEMA,
    FALLBACK_CONFIDENCE, FALLBACK_FRACTION,
};
pub use layout::{
    bundled_layouts, load_layouts, parse_layouts, LayoutTemplate, Panel, PanelPixels, Slot, LAYOUT_SCHEMA,
};

pub const DEFAULT_PAGE_WIDTH: usize = 1280;

/// What one page will be rendered from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PagePlan {
    pub layout_id: String,
    pub style_name: String,
    pub assignment_seed: u64,
}

#[derive(Debug, Clone)]
pub struct StoryboardPage {
    pub plan: PagePlan,
    pub image: ImageBuffer,
}

/// Drops near-duplicates, keeping each cluster's sharpest frame in temporal order.
pub fn select_frames(frames: Vec<Frame>) -> Result<Vec<Frame>> {
    if frames.is_empty() {
        return Err(Error::invalid("no images"));
    }
    let candidates: Vec<Candidate> = frames
        .iter()
        .map(|f| Candidate::new(f.id.clone(), f.image.clone()))
        .collect();
    let report = select(&candidates, DEFAULT_DUPLICATE_THRESHOLD, &SharpnessConfig::default())?;
    let keep: std::collections::BTreeSet<&str> = report.representatives.iter().map(String::as_str).collect();
    let kept: Vec<Frame> = frames.iter().filter(|f| keep.contains(f.id.as_str())).cloned().collect();
    Ok(kept)
}

/// Draws `count` (layout, style, assignment) triples from `seed`, using only
/// layouts that `n_frames` frames can fill. Combinations may repeat; their
/// assignment seeds differ.
pub fn plan_pages(
    n_frames: usize,
    layouts: &[LayoutTemplate],
    styles: &[StylePipeline],
    count: usize,
    seed: u64,
) -> Result<Vec<PagePlan>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    if n_frames == 0 {
        return Err(Error::invalid("no images"));
    }
    let usable: Vec<&LayoutTemplate> = layouts.iter().filter(|t| t.demand() <= n_frames).collect();
    if usable.is_empty() {
        return Err(Error::invalid(format!("no layout can be filled with {n_frames} images")));
    }
    if styles.is_empty() {
        return Err(Error::invalid("no styles to choose from"));
    }
    let mut rng = StyleRng::new(seed);
    Ok((0..count)
        .map(|_| {
            let layout = usable[rng.below(usable.len() as u64) as usize];
            let style = &styles[rng.below(styles.len() as u64) as usize];
            PagePlan {
                layout_id: layout.id.clone(),
                style_name: style.name.clone(),
                assignment_seed: rng.next_u64(),
            }
        })
        .collect())
}

/// Renders every planned page; pages are independent and run in parallel.
pub fn render_pages(
    frames: &[Frame],
    plans: &[PagePlan],
    layouts: &[LayoutTemplate],
    styles: &[StylePipeline],
    page_w: usize,
) -> Result<Vec<StoryboardPage>> {
    plans
        .par_iter()
        .map(|plan| {
            let layout = layouts
                .iter()
                .find(|t| t.id == plan.layout_id)
                .ok_or_else(|| Error::invalid(format!("unknown layout `{}`", plan.layout_id)))?;
            let style = styles
                .iter()
                .find(|s| s.name == plan.style_name)
                .ok_or_else(|| Error::invalid(format!("unknown style `{}`", plan.style_name)))?;
            Ok(StoryboardPage {
                plan: plan.clone(),
                image: compose(frames, layout, style, page_w, plan.assignment_seed)?,
            })
        })
        .collect()
}

/// Selection, planning and rendering in one call.
pub fn storyboards(
    frames: Vec<Frame>,
    layouts: &[LayoutTemplate],
    styles: &[StylePipeline],
    count: usize,
    seed: u64,
    page_w: usize,
) -> Result<Vec<StoryboardPage>> {
    let frames = select_frames(frames)?;
    let plans = plan_pages(frames.len(), layouts, styles, count, seed)?;
    render_pages(&frames, &plans, layouts, styles, page_w)
}
