use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};

use storyboard_core::imaging::resize;
use storyboard_core::pipeline::{execute_with_timings, Layer, Timings};
use storyboard_core::synth;

use crate::{load_image, load_style, write_file, CliError, CliResult};

/// Times a style on one image and reports per-block medians.
#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Style document path, or the name of a bundled style.
    #[arg(long)]
    pub style: String,
    /// Image size as WIDTHxHEIGHT.
    #[arg(long, default_value = "1920x1080", value_parser = parse_size)]
    pub size: (usize, usize),
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    /// Untimed runs before measuring.
    #[arg(long, default_value_t = 1)]
    pub warmup: u32,
    /// Worker threads for the filters; one stream by default.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub threads: u32,
    /// Input image, resized to --size; a synthetic scene when omitted.
    #[arg(long = "in")]
    pub input: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or("expected WIDTHxHEIGHT")?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width `{w}`"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height `{h}`"))?;
    if w == 0 || h == 0 {
        return Err("sizes must be positive".into());
    }
    Ok((w, h))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchBlock {
    pub layer: String,
    pub index: usize,
    pub kind: String,
    /// Short block name as used in timing tables.
    pub label: String,
    pub median_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BenchReport {
    pub style: String,
    pub width: usize,
    pub height: usize,
    pub repeat: u32,
    pub threads: u32,
    pub total_median_ms: f64,
    pub total_min_ms: f64,
    pub total_max_ms: f64,
    pub runs_ms: Vec<f64>,
    pub blocks: Vec<BenchBlock>,
    /// Sum of the per-block medians.
    pub block_sum_ms: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

impl BenchArgs {
    pub fn run(&self) -> CliResult<()> {
        let report = self.measure()?;
        let json = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        match &self.out {
            Some(path) => write_file(path, json),
            None => {
                print!("{json}");
                Ok(())
            }
        }
    }

    pub fn measure(&self) -> CliResult<BenchReport> {
        let style = load_style(&self.style)?;
        let (w, h) = self.size;
        let img = match &self.input {
            Some(p) => resize(&load_image(p)?, w, h)?,
            None => synth::scene(1, w, h),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads as usize)
            .build()
            .map_err(|e| CliError::io(format!("thread pool: {e}")))?;
        let mut runs = Vec::with_capacity(self.repeat as usize);
        let mut per_run: Vec<Timings> = Vec::with_capacity(self.repeat as usize);
        pool.install(|| -> CliResult<()> {
            for _ in 0..self.warmup {
                execute_with_timings(&style, &img)?;
            }
            for _ in 0..self.repeat {
                let start = Instant::now();
                let (_, timings) = execute_with_timings(&style, &img)?;
                runs.push(start.elapsed().as_secs_f64() * 1e3);
                per_run.push(timings);
            }
            Ok(())
        })?;
        let mut blocks: Vec<BenchBlock> = per_run[0]
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let samples: Vec<f64> = per_run.iter().map(|r| r.blocks[i].ms).collect();
                BenchBlock {
                    layer: match b.layer {
                        Layer::Background => "background",
                        Layer::Foreground => "foreground",
                    }
                    .to_string(),
                    index: b.index,
                    kind: b.kind.name().to_string(),
                    label: b.label.to_string(),
                    median_ms: median(&samples),
                }
            })
            .collect();
        let merge: Vec<f64> = per_run.iter().map(|r| r.merge_ms).collect();
        blocks.push(BenchBlock {
            layer: "output".into(),
            index: 0,
            kind: "Merge".into(),
            label: "Merge".into(),
            median_ms: median(&merge),
        });
        Ok(BenchReport {
            style: style.name.clone(),
            width: w,
            height: h,
            repeat: self.repeat,
            threads: self.threads,
            total_median_ms: median(&runs),
            total_min_ms: runs.iter().copied().fold(f64::INFINITY, f64::min),
            total_max_ms: runs.iter().copied().fold(0.0, f64::max),
            block_sum_ms: blocks.iter().map(|b| b.median_ms).sum(),
            runs_ms: runs,
            blocks,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_parse() {
        assert_eq!(parse_size("1920x1080"), Ok((1920, 1080)));
        assert_eq!(parse_size("64X32"), Ok((64, 32)));
        assert!(parse_size("0x5").is_err());
        assert!(parse_size("12").is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
