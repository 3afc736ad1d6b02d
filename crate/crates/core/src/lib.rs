//! Storyboard generation: near-duplicate selection, stylization filters and
//! style pipelines, procedural styles, and page composition.

pub mod error;
pub mod filters;
pub mod imaging;
pub mod pipeline;
pub mod procedural;
pub mod selection;
pub mod storyboard;
pub mod synth;

pub use error::{Error, Result};
pub use imaging::{Channels, ImageBuffer};
