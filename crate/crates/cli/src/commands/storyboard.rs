use std::path::{Path, PathBuf};

use clap::Args;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use storyboard_core::imaging::io::encode_png;
use storyboard_core::storyboard::{
    bundled_layouts, load_layouts, parse_detections, plan_pages, render_pages, select_frames, Frame, PagePlan,
    DEFAULT_PAGE_WIDTH, MIN_PAGE_WIDTH,
};

use crate::{file_name, image_files, load_image, load_styles, read_text, write_file, CliError, CliResult};

/// Turns a directory of frames into `count` stylized pages.
///
/// A frame `NAME.png` may come with a detections sidecar `NAME.detections.json`.
#[derive(Debug, Args)]
pub struct StoryboardArgs {
    /// Frames in temporal (file-name) order.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PAGE_WIDTH)]
    pub page_width: usize,
    /// Style files or directories; the bundled styles when omitted.
    #[arg(long = "styles")]
    pub styles: Vec<PathBuf>,
    /// Layout file or directory; the bundled layouts when omitted.
    #[arg(long)]
    pub layouts: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestPage {
    pub file: String,
    pub layout_id: String,
    pub style_name: String,
    pub assignment_seed: u64,
}

/// `storyboard.json`, written next to the pages.
#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct StoryboardManifest {
    pub seed: u64,
    pub frames: Vec<String>,
    pub selected: Vec<String>,
    pub pages: Vec<ManifestPage>,
}

fn sidecar_path(image: &Path) -> PathBuf {
    let stem = image.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    image.with_file_name(format!("{stem}.detections.json"))
}

fn load_frame(path: &Path) -> CliResult<Frame> {
    let mut frame = Frame::new(file_name(path), load_image(path)?);
    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        let (w, h) = frame.image.dimensions();
        frame.detections = parse_detections(&read_text(&sidecar)?, w, h)
            .map_err(|e| CliError::invalid(format!("{}: {e}", sidecar.display())))?;
    }
    Ok(frame)
}

impl StoryboardArgs {
    pub fn run(&self) -> CliResult<()> {
        if self.page_width < MIN_PAGE_WIDTH {
            return Err(CliError::invalid(format!("--page-width must be at least {MIN_PAGE_WIDTH}")));
        }
        let styles = load_styles(&self.styles)?;
        let layouts = match &self.layouts {
            Some(p) => load_layouts(p)?,
            None => bundled_layouts(),
        };
        let files = image_files(&self.input)?;
        let frames = files.par_iter().map(|p| load_frame(p)).collect::<CliResult<Vec<_>>>()?;
        let names: Vec<String> = frames.iter().map(|f| f.id.clone()).collect();
        let frames = select_frames(frames)?;
        let plans = plan_pages(frames.len(), &layouts, &styles, self.count, self.seed)?;
        let pages = render_pages(&frames, &plans, &layouts, &styles, self.page_width)?;

        let mut manifest = StoryboardManifest {
            seed: self.seed,
            frames: names,
            selected: frames.iter().map(|f| f.id.clone()).collect(),
            pages: Vec::with_capacity(pages.len()),
        };
        for (i, page) in pages.iter().enumerate() {
            let file = format!("page-{i:02}.png");
            write_file(&self.out.join(&file), encode_png(&page.image)?)?;
            let PagePlan { layout_id, style_name, assignment_seed } = page.plan.clone();
            manifest.pages.push(ManifestPage { file, layout_id, style_name, assignment_seed });
        }
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        write_file(&self.out.join("storyboard.json"), json + "\n")?;
        println!(
            "{} frames, {} selected, {} pages in {}",
            manifest.frames.len(),
            manifest.selected.len(),
            pages.len(),
            self.out.display()
        );
        Ok(())
    }
}
