use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use storyboard_core::selection::{select, Candidate, SharpnessConfig, DEFAULT_DUPLICATE_THRESHOLD};

use crate::{file_name, image_files, load_image, write_file, CliResult};

/// Groups near-duplicate images and picks the sharpest of each group.
#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Directory of images, taken in file-name order.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Hamming distance (bits) at or below which images are near-duplicates.
    #[arg(long, default_value_t = DEFAULT_DUPLICATE_THRESHOLD, value_parser = clap::value_parser!(u32).range(0..=64))]
    pub threshold: u32,
    /// Where to write the JSON report.
    #[arg(long)]
    pub report: PathBuf,
}

impl SelectArgs {
    pub fn run(&self) -> CliResult<()> {
        let files = image_files(&self.input)?;
        let candidates = files
            .par_iter()
            .map(|p| Ok(Candidate::new(file_name(p), load_image(p)?)))
            .collect::<CliResult<Vec<_>>>()?;
        let report = select(&candidates, self.threshold, &SharpnessConfig::default())?;
        write_file(&self.report, report.to_json() + "\n")?;
        println!(
            "{} images, {} clusters, report in {}",
            candidates.len(),
            report.clusters.len(),
            self.report.display()
        );
        Ok(())
    }
}
