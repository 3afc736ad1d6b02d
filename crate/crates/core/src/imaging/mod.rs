//! Raster type, color conversion, resampling and gradients shared by every other module.

mod buffer;
mod color;
mod gradient;
pub mod io;
mod resize;

pub use buffer::{clip_u8, clip_u8_f64, Channels, ImageBuffer};
pub use color::{
    chroma_of, luma, luma_f32, luma_image, on_luma, to_color, to_gray, yuv_to_rgb, yuv_to_rgb_in_gamut,
    ChromaPlanes,
};
pub use gradient::{central_gradient, GradientField};
pub use resize::{bilinear, fit_dimensions, fit_max_dim, halve, halving_chain, resize};
