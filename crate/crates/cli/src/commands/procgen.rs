use std::path::PathBuf;

use clap::Args;
use rayon::prelude::*;

use storyboard_core::imaging::fit_max_dim;
use storyboard_core::procedural::{explore_report, generate, score, HeuristicScorer, ProcGenConfig};
use storyboard_core::synth;

use crate::{file_name, image_files, load_image, CliResult};

/// Generates random styles, ranks them on probe images and writes a gallery.
#[derive(Debug, Args)]
pub struct ProcgenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    /// Directory of probe images; three synthetic scenes when omitted.
    #[arg(long)]
    pub probes: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// How many of the best styles go into the gallery.
    #[arg(long, default_value_t = 12)]
    pub top: usize,
    /// Probes are downscaled to this longest side before scoring.
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(16..))]
    pub probe_max: u32,
}

impl ProcgenArgs {
    pub fn run(&self) -> CliResult<()> {
        let probes: Vec<(String, _)> = match &self.probes {
            Some(dir) => image_files(dir)?
                .iter()
                .map(|p| Ok((file_name(p), load_image(p)?)))
                .collect::<CliResult<_>>()?,
            None => (0..3).map(|i| (format!("synthetic-{i}"), synth::scene(100 + i, 384, 216))).collect(),
        };
        let probes = probes
            .into_iter()
            .map(|(n, img)| Ok((n, fit_max_dim(&img, self.probe_max as usize)?)))
            .collect::<CliResult<Vec<_>>>()?;
        let images: Vec<_> = probes.iter().map(|(_, img)| img.clone()).collect();

        let cfg = ProcGenConfig {
            seed: self.seed,
            count: self.count,
            ..ProcGenConfig::default()
        };
        let scorer = HeuristicScorer::default();
        let mut scored = generate(&cfg)?
            .par_iter()
            .map(|s| score(s, &images, &scorer))
            .collect::<Result<Vec<_>, _>>()?;
        scored.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.style.name.cmp(&b.style.name)));
        scored.truncate(self.top);
        let manifest = explore_report(&scored, &probes, &self.out, self.probe_max as usize)?;
        println!(
            "{} styles generated, top {} in {}",
            self.count,
            manifest.entries.len(),
            self.out.join("index.html").display()
        );
        Ok(())
    }
}
