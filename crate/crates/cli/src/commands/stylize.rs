use std::path::PathBuf;

use clap::Args;

use storyboard_core::imaging::io::encode_png;
use storyboard_core::pipeline::stylize;

use crate::{load_image, load_style, write_file, CliResult};

/// Applies a style to one image.
#[derive(Debug, Args)]
pub struct StylizeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Style document path, or the name of a bundled style.
    #[arg(long)]
    pub style: String,
    #[arg(long)]
    pub out: PathBuf,
    /// Downscale first so the longest side is at most this many pixels.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_dim: Option<u32>,
}

impl StylizeArgs {
    pub fn run(&self) -> CliResult<()> {
        let style = load_style(&self.style)?;
        let img = load_image(&self.input)?;
        let out = stylize(&style, &img, self.max_dim.map(|d| d as usize))?;
        write_file(&self.out, encode_png(&out)?)
    }
}
