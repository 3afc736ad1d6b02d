//! Two-layer styles: a color background chain, an optional line foreground
//! chain used as ink alpha, and their JSON document form.

mod document;

use std::borrow::Cow;
use std::fmt;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::{ChannelRule, FilterBlock, FilterKind};
use crate::imaging::{fit_max_dim, resize, Channels, ImageBuffer};

pub use document::{
    bundled_styles, parse, parse_value, serialize, STYLE_SCHEMA, STYLE_SCHEMA_VERSION,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Layer {
    Background,
    Foreground,
}

impl Layer {
    pub fn as_str(self) -> &'static str {
        match self {
            Layer::Background => "background",
            Layer::Foreground => "foreground",
        }
    }
}

/// One channel-compatibility violation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChainError {
    pub layer: Layer,
    /// Offending block, or `None` for a whole-chain problem.
    pub index: Option<usize>,
    pub message: String,
}

impl fmt::Display for ChainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.layer.as_str(), self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StylePipeline {
    pub name: String,
    pub background: Vec<FilterBlock>,
    pub foreground: Option<Vec<FilterBlock>>,
    pub line_color: [u8; 3],
}

impl StylePipeline {
    /// Identity style: empty background, no foreground, black ink.
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            background: Vec::new(),
            foreground: None,
            line_color: [0, 0, 0],
        }
    }

    pub fn with_background(mut self, blocks: Vec<FilterBlock>) -> Self {
        self.background = blocks;
        self
    }

    pub fn with_foreground(mut self, blocks: Vec<FilterBlock>) -> Self {
        self.foreground = Some(blocks);
        self
    }

    pub fn block_count(&self) -> usize {
        self.background.len() + self.foreground.as_ref().map_or(0, Vec::len)
    }
}

/// Channel count after the chain, starting from an RGB input.
fn check_chain(layer: Layer, chain: &[FilterBlock], errors: &mut Vec<ChainError>) -> usize {
    let mut channels = 3;
    let mut saved = false;
    let mut err = |index: usize, message: String| {
        errors.push(ChainError {
            layer,
            index: Some(index),
            message,
        })
    };
    for (i, block) in chain.iter().enumerate() {
        let kind = block.kind();
        match kind.channel_rule() {
            ChannelRule::SplitChroma => {
                if channels != 3 {
                    err(i, format!("ToGray needs a 3-channel input at index {i}"));
                }
                channels = 1;
                saved = true;
            }
            ChannelRule::MergeChroma => {
                if !saved {
                    err(i, format!("ToColor without prior ToGray at index {i}"));
                } else if channels != 1 {
                    err(i, format!("ToColor needs a 1-channel input at index {i}"));
                }
                channels = 3;
                saved = false;
            }
            ChannelRule::RequiresRgb => {
                if channels != 3 {
                    err(i, format!("{kind} needs a 3-channel input at index {i}"));
                }
            }
            ChannelRule::OutputsGray => channels = 1,
            ChannelRule::OutputsRgb => channels = 3,
            ChannelRule::Preserve => {}
        }
    }
    channels
}

/// Every channel-compatibility problem of the style; empty means executable.
pub fn validate(p: &StylePipeline) -> Vec<ChainError> {
    let mut errors = Vec::new();
    check_chain(Layer::Background, &p.background, &mut errors);
    if let Some(fg) = &p.foreground {
        let channels = check_chain(Layer::Foreground, fg, &mut errors);
        if channels != 1 {
            errors.push(ChainError {
                layer: Layer::Foreground,
                index: None,
                message: format!("foreground must end with a 1-channel image, ends with {channels}"),
            });
        }
    }
    errors
}

/// Wall time of one executed block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockTiming {
    pub layer: Layer,
    pub index: usize,
    pub kind: FilterKind,
    pub label: &'static str,
    pub ms: f64,
}

fn run_chain(
    layer: Layer,
    chain: &[FilterBlock],
    img: &ImageBuffer,
    timings: &mut Option<&mut Vec<BlockTiming>>,
) -> Result<ImageBuffer> {
    let mut saved = None;
    let mut cur = Cow::Borrowed(img);
    for (index, block) in chain.iter().enumerate() {
        let start = Instant::now();
        cur = Cow::Owned(block.apply(&cur, &mut saved)?);
        if let Some(t) = timings.as_deref_mut() {
            t.push(BlockTiming {
                layer,
                index,
                kind: block.kind(),
                label: block.kind().label(),
                ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    Ok(cur.into_owned())
}

/// Undoes any resizing done by the chain.
fn restore_size(img: ImageBuffer, (w, h): (usize, usize)) -> Result<ImageBuffer> {
    if img.dimensions() == (w, h) {
        Ok(img)
    } else {
        resize(&img, w, h)
    }
}

fn execute_inner(p: &StylePipeline, img: &ImageBuffer, mut timings: Option<&mut Timings>) -> Result<ImageBuffer> {
    let errors = validate(p);
    if !errors.is_empty() {
        return Err(Error::InvalidPipeline(errors));
    }
    let input = match img.channels() {
        Channels::Rgb => Cow::Borrowed(img),
        _ => Cow::Owned(img.to_rgb()),
    };
    let mut blocks = timings.as_deref_mut().map(|t| &mut t.blocks);
    let bg = run_chain(Layer::Background, &p.background, &input, &mut blocks)?;
    let fg = match &p.foreground {
        Some(chain) => Some(run_chain(Layer::Foreground, chain, &input, &mut blocks)?),
        None => None,
    };
    let start = Instant::now();
    let size = input.dimensions();
    let bg = restore_size(bg, size)?.to_rgb();
    let out = match fg {
        Some(fg) => {
            let fg = restore_size(fg, size)?;
            debug_assert_eq!(fg.channels(), Channels::Gray);
            composite(&bg, &fg, p.line_color)
        }
        None => bg,
    };
    if let Some(t) = timings {
        t.merge_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(out)
}

/// Applies the style; output is RGB at the input's dimensions.
pub fn execute(p: &StylePipeline, img: &ImageBuffer) -> Result<ImageBuffer> {
    execute_inner(p, img, None)
}

/// Longest side of interactive previews.
pub const DEFAULT_PREVIEW_MAX_DIM: usize = 720;

/// Downscales so the longest side is at most `max_dim` (if given), then
/// applies the style. The CLI and the preview endpoint both go through here.
pub fn stylize(p: &StylePipeline, img: &ImageBuffer, max_dim: Option<usize>) -> Result<ImageBuffer> {
    let errors = validate(p);
    if !errors.is_empty() {
        return Err(Error::InvalidPipeline(errors));
    }
    match max_dim {
        Some(d) => execute(p, &fit_max_dim(img, d)?),
        None => execute(p, img),
    }
}

/// Wall times of one execution.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    /// Every block in execution order, background first.
    pub blocks: Vec<BlockTiming>,
    /// Final step: undoing resizes, background to RGB and ink compositing.
    pub merge_ms: f64,
}

impl Timings {
    pub fn total_ms(&self) -> f64 {
        self.blocks.iter().map(|b| b.ms).sum::<f64>() + self.merge_ms
    }
}

/// Like [`execute`], also returning wall times per block.
pub fn execute_with_timings(p: &StylePipeline, img: &ImageBuffer) -> Result<(ImageBuffer, Timings)> {
    let mut timings = Timings::default();
    let out = execute_inner(p, img, Some(&mut timings))?;
    Ok((out, timings))
}

/// Ink compositing: white foreground keeps the background, black paints `line_color`.
pub fn composite(bg: &ImageBuffer, fg: &ImageBuffer, line_color: [u8; 3]) -> ImageBuffer {
    let mut out = bg.clone();
    for (px, &f) in out.data_mut().chunks_exact_mut(3).zip(fg.data()) {
        let f = f as u32;
        for (c, &lc) in px.iter_mut().zip(&line_color) {
            *c = ((f * *c as u32 + (255 - f) * lc as u32 + 127) / 255) as u8;
        }
    }
    out
}
