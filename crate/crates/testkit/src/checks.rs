//! Property checks over generated corpora. Each returns an [`Outcome`] with
//! the measured numbers so a report can show why it passed or failed.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use storyboard_core::filters::{self, luma_histogram, percentile, total_variation, Plane};
use storyboard_core::pipeline::{execute, validate};
use storyboard_core::procedural::{generate, ProcGenConfig, StyleRng};
use storyboard_core::selection::{hamming, perceptual_hash, sharpness, SharpnessConfig};
use storyboard_core::storyboard::{best_crop, candidate_crops, DetectionBox, DetectionKind, PixelRect};
use storyboard_core::synth;
use storyboard_core::{Channels, ImageBuffer};

use crate::{median, oracles, random_image};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let t = Instant::now();
    let (passed, detail) = f();
    Outcome {
        name,
        passed,
        detail,
        elapsed: t.elapsed(),
    }
}

/// Worst difference per filter between the optimized filters and the
/// references over `n` random images of at most 32×32.
pub fn filter_oracle_diffs(n: u64) -> BTreeMap<&'static str, u8> {
    let mut worst: BTreeMap<&'static str, u8> = BTreeMap::new();
    let mut record = |name: &'static str, d: u8| {
        let e = worst.entry(name).or_insert(0);
        *e = (*e).max(d);
    };
    for i in 0..n {
        let img = random_image(i, 32);
        let mut rng = StyleRng::new(1000 + i);

        let sigma = rng.real(0.3, 20.0);
        record("gaussian", oracles::max_abs_diff(&filters::gaussian(&img, sigma).unwrap(), &oracles::gaussian(&img, sigma)));

        record("sobel", oracles::max_abs_diff(&filters::sobel(&img), &oracles::sobel(&img)));

        let (sigma, p) = (rng.real(0.5, 8.0), rng.real(1.0, 40.0));
        record("xdog", oracles::max_abs_diff(&filters::xdog(&img, sigma, p).unwrap(), &oracles::xdog(&img, sigma, p)));

        let (iters, dt, eps) = (rng.int(1, 100) as u32, rng.real(0.01, 0.25), rng.real(0.01, 25.5));
        record(
            "tvf",
            oracles::max_abs_diff(&filters::tvf(&img, iters, dt, eps).unwrap(), &oracles::tvf(&img, iters, dt, eps)),
        );

        let (radius, iters) = (rng.int(1, 8) as usize, rng.int(1, 4) as u32);
        record(
            "etf",
            oracles::max_abs_diff(&filters::etf(&img, radius, iters).unwrap(), &oracles::etf(&img, radius, iters)),
        );

        let delta = rng.real(-100.0, 60.0);
        record(
            "detail_control",
            oracles::max_abs_diff(&filters::detail_control(&img, delta).unwrap(), &oracles::detail_control(&img, delta)),
        );

        let (phi, eps) = (rng.real(0.013, 0.059), rng.real(50.0, 110.0));
        record(
            "soft_threshold",
            oracles::max_abs_diff(&filters::soft_threshold(&img, phi, eps).unwrap(), &oracles::soft_threshold(&img, phi, eps)),
        );

        let levels = rng.int(2, 255) as u32;
        record(
            "posterize",
            oracles::max_abs_diff(&filters::posterize(&img, levels).unwrap(), &oracles::posterize(&img, levels)),
        );
    }
    worst
}

/// Allowed difference from the reference, in gray levels.
pub fn oracle_tolerance(filter: &str) -> u8 {
    if filter == "tvf" || filter == "etf" {
        2
    } else {
        1
    }
}

pub fn filter_oracle_suite() -> Outcome {
    timed("filter oracle suite", || {
        let t = Instant::now();
        let worst = filter_oracle_diffs(100);
        let secs = t.elapsed().as_secs_f64();
        let within = worst.iter().all(|(k, &d)| d <= oracle_tolerance(k));
        let detail = worst.iter().map(|(k, d)| format!("{k}≤{d}")).collect::<Vec<_>>().join(" ");
        (within && secs < 60.0, format!("100 images, worst diffs {detail}, {secs:.1}s"))
    })
}

pub fn formula_spot_checks() -> Outcome {
    timed("formula spot-checks", || {
        let mut rng = StyleRng::new(77);
        let mut threshold_ok = 0;
        for _ in 0..20 {
            let phi = rng.real(0.013, 0.059);
            let eps = rng.real(50.0, 110.0).round();
            let img = ImageBuffer::filled(4, 4, Channels::Gray, eps as u8).unwrap();
            let out = filters::soft_threshold(&img, phi, eps).unwrap();
            if out.data().iter().all(|&v| v == 255) {
                threshold_ok += 1;
            }
        }

        let mut corpus = synth::scene_corpus(10, 500, 64, 48);
        corpus.extend((0..10).map(|i| synth::noise(600 + i, 64, 48, Channels::Rgb)));
        let mut posterize_ok = true;
        for (i, img) in corpus.iter().enumerate() {
            let levels = 2 + (i as u32 * 37) % 30;
            let out = filters::posterize(img, levels).unwrap();
            let mut seen = [false; 256];
            for &v in out.data() {
                seen[v as usize] = true;
            }
            posterize_ok &= seen.iter().filter(|&&s| s).count() <= levels as usize;
        }

        let mut equalize_ok = true;
        for i in 0..10 {
            let channels = if i % 2 == 0 { Channels::Gray } else { Channels::Rgb };
            let img = synth::noise(700 + i, 64, 64, channels);
            let hist = luma_histogram(&img);
            let (p5, p95) = (percentile(&hist, 5.0), percentile(&hist, 95.0));
            let out = filters::linear_equalize(&img, 5.0, 95.0).unwrap();
            // luma of every input pixel at p5 / p95 after the mapping
            let lo = luma_of_level(&img, &out, p5, u8::max).unwrap_or(0);
            let hi = luma_of_level(&img, &out, p95, u8::min).unwrap_or(255);
            equalize_ok &= lo <= 1 && hi >= 254;
        }
        (
            threshold_ok == 20 && posterize_ok && equalize_ok,
            format!(
                "soft_threshold(ε)=255 in {threshold_ok}/20, posterize level counts {}, equalize p5/p95 {}",
                if posterize_ok { "ok" } else { "exceeded" },
                if equalize_ok { "ok" } else { "off" }
            ),
        )
    })
}

/// Output luma of pixels whose input luma is `level`, folded with `pick`.
fn luma_of_level(input: &ImageBuffer, output: &ImageBuffer, level: u8, pick: fn(u8, u8) -> u8) -> Option<u8> {
    let li = oracles::luma(input);
    let lo = oracles::luma(output);
    li.iter()
        .zip(&lo)
        .filter(|(a, _)| **a as u8 == level)
        .map(|(_, b)| *b as u8)
        .reduce(pick)
}

pub fn tv_monotonicity() -> Outcome {
    timed("TV monotonicity", || {
        let mut increases = 0;
        let mut worst_drift = 0f64;
        for i in 0..20 {
            let img = synth_or_random(i);
            for (c, plane) in Plane::planes(&img).into_iter().enumerate() {
                let mut u = plane;
                let mut tv = total_variation(&u);
                for _ in 0..50 {
                    u = filters::tv_flow_step(&u, 0.2, (1e-3 * 255.0) as f32);
                    let next = total_variation(&u);
                    // f32 state: allow round-off, nothing more
                    if next > tv * (1.0 + 1e-6) {
                        increases += 1;
                    }
                    tv = next;
                }
                let mean_in = img_channel_mean(&img, c);
                let mean_out = u.data.iter().map(|&v| v as f64).sum::<f64>() / u.data.len() as f64;
                worst_drift = worst_drift.max((mean_out - mean_in).abs());
            }
            let out = filters::tvf(&img, 50, 0.2, 1e-3 * 255.0).unwrap();
            for c in 0..img.channel_count() {
                worst_drift = worst_drift.max((img_channel_mean(&out, c) - img_channel_mean(&img, c)).abs());
            }
        }
        (
            increases == 0 && worst_drift <= 0.5,
            format!("20 images × 50 steps: {increases} TV increases, worst mean drift {worst_drift:.3}"),
        )
    })
}

fn synth_or_random(i: u64) -> ImageBuffer {
    if i % 2 == 0 {
        synth::scene(900 + i, 48, 40)
    } else {
        random_image(900 + i, 40)
    }
}

fn img_channel_mean(img: &ImageBuffer, c: usize) -> f64 {
    let n = img.pixel_count();
    let k = img.channel_count();
    img.data().iter().skip(c).step_by(k).map(|&v| v as f64).sum::<f64>() / n as f64
}

/// The bundled 50-scene corpus used by the hash and sharpness checks.
pub fn scene_corpus() -> Vec<ImageBuffer> {
    synth::scene_corpus(50, 2024, 160, 120)
}

pub fn hash_properties() -> Outcome {
    timed("hash properties", || {
        let corpus = scene_corpus();
        let hashes: Vec<_> = corpus.iter().map(perceptual_hash).collect();
        let self_zero = corpus.iter().zip(&hashes).all(|(img, &h)| hamming(perceptual_hash(img), h) == 0);
        let near = corpus
            .iter()
            .zip(&hashes)
            .filter(|(img, &h)| hamming(perceptual_hash(&filters::gaussian(img, 1.0).unwrap()), h) <= 6)
            .count();
        let mut cross: Vec<f64> = Vec::new();
        for i in 0..hashes.len() {
            for j in i + 1..hashes.len() {
                cross.push(hamming(hashes[i], hashes[j]) as f64);
            }
        }
        let med = median(&mut cross);
        let rate = near as f64 / corpus.len() as f64;
        (
            self_zero && rate >= 0.95 && med >= 16.0,
            format!("self 0: {self_zero}, blur σ=1 within 6 bits {near}/50, cross-scene median {med}"),
        )
    })
}

pub fn sharpness_ordering() -> Outcome {
    timed("sharpness ordering", || {
        let cfg = SharpnessConfig::default();
        let corpus = scene_corpus();
        let ordered = corpus
            .iter()
            .filter(|img| {
                let s0 = sharpness(img, &cfg).unwrap();
                let s1 = sharpness(&filters::gaussian(img, 1.0).unwrap(), &cfg).unwrap();
                let s2 = sharpness(&filters::gaussian(img, 2.0).unwrap(), &cfg).unwrap();
                s0 >= s1 && s1 >= s2
            })
            .count();
        (ordered * 100 >= 95 * corpus.len(), format!("ordered for {ordered}/{}", corpus.len()))
    })
}

pub fn procedural_distribution() -> Outcome {
    use storyboard_core::filters::FilterKind;
    use storyboard_core::procedural::{ParamRanges, REPEATABLE};
    timed("procedural distribution", || {
        let cfg = ProcGenConfig {
            seed: 42,
            count: 10_000,
            ..ProcGenConfig::default()
        };
        let styles = generate(&cfg).unwrap();
        let ranges = ParamRanges::default();
        let probe = synth::scene(4242, 64, 64);
        let mut counts = [0usize; 10];
        let (mut gray, mut out_of_range, mut bad_repeat) = (0, 0, 0);
        let failed = styles.par_iter().filter(|s| !validate(s).is_empty() || execute(s, &probe).is_err()).count();
        for s in &styles {
            let chain = &s.background;
            let pool: Vec<_> = chain
                .iter()
                .filter(|b| !matches!(b.kind(), FilterKind::ToGray | FilterKind::ToColor))
                .collect();
            counts[pool.len().min(9)] += 1;
            if chain.iter().any(|b| b.kind() == FilterKind::ToGray) {
                gray += 1;
            }
            let mut seen = BTreeMap::new();
            for b in &pool {
                *seen.entry(b.kind()).or_insert(0) += 1;
                for (name, &v) in b.params() {
                    if let Some(r) = param_range(&ranges, b.kind(), name) {
                        if v < r.0 || v > r.1 {
                            out_of_range += 1;
                        }
                    }
                }
            }
            if seen.iter().any(|(k, &n)| n > 1 && !REPEATABLE.contains(k)) {
                bad_repeat += 1;
            }
        }
        let n = styles.len() as f64;
        let uniform = (4..=9).all(|k| (counts[k] as f64 / n - 1.0 / 6.0).abs() <= 0.02) && counts[..4].iter().all(|&c| c == 0);
        let gray_rate = gray as f64 / n;
        let passed = uniform && (gray_rate - 0.2).abs() <= 0.02 && out_of_range == 0 && bad_repeat == 0 && failed == 0;
        let freq: Vec<String> = (4..=9).map(|k| format!("{:.3}", counts[k] as f64 / n)).collect();
        (
            passed,
            format!(
                "10⁴ styles: count freq [{}], ToGray {gray_rate:.3}, {out_of_range} params out of range, {bad_repeat} bad repeats, {failed} failed on 64×64",
                freq.join(" ")
            ),
        )
    })
}

fn param_range(r: &storyboard_core::procedural::ParamRanges, kind: storyboard_core::filters::FilterKind, name: &str) -> Option<(f64, f64)> {
    use storyboard_core::filters::FilterKind::*;
    let range = match (kind, name) {
        (XDoG, "sigma") => r.xdog_sigma,
        (XDoG, "p") => r.xdog_p,
        (SoftThreshold, "phi") => r.threshold_phi,
        (SoftThreshold, "epsilon") => r.threshold_epsilon,
        (DetailControl, "delta") => r.detail_delta,
        (LumaPosterize, "levels") => r.posterize_levels,
        (Saturation, "saturation") => r.saturation,
        (Size, "percent") => r.size_percent,
        (Tvf, "iterations") => r.tvf_iterations,
        _ => return None,
    };
    Some((range.min, range.max))
}

/// A random framing problem with a box that fits inside some crop of the
/// target aspect.
pub fn framing_case(rng: &mut StyleRng) -> (usize, usize, PixelRect, f64) {
    let w = rng.int(32, 2000) as usize;
    let h = rng.int(32, 2000) as usize;
    let aspect = rng.real(0.25f64.ln(), 4f64.ln()).exp();
    // largest crop of that aspect inside the image
    let cw = (w as f64).min(h as f64 * aspect);
    let ch = cw / aspect;
    let bw = rng.int(1, (cw.floor() as i64 - 1).max(1)) as usize;
    let bh = rng.int(1, (ch.floor() as i64 - 1).max(1)) as usize;
    let x = rng.int(0, (w - bw) as i64) as usize;
    let y = rng.int(0, (h - bh) as i64) as usize;
    (w, h, PixelRect::new(x, y, bw, bh), aspect)
}

/// Whether `rect` has `aspect` up to one pixel of rounding on either side.
pub fn aspect_within_one_px(rect: &PixelRect, aspect: f64) -> bool {
    let dw = (rect.w as f64 - rect.h as f64 * aspect).abs();
    let dh = (rect.h as f64 - rect.w as f64 / aspect).abs();
    dw.min(dh) <= 1.0
}

pub fn framing() -> Outcome {
    timed("framing", || {
        let mut rng = StyleRng::new(31337);
        let (mut contained, mut bounded, mut matched) = (0, 0, 0);
        for _ in 0..1000 {
            let (w, h, rect, aspect) = framing_case(&mut rng);
            let det = DetectionBox {
                image_id: "case".into(),
                rect,
                kind: DetectionKind::Object,
                confidence: 1.0,
            };
            let crop = best_crop(&candidate_crops(&det, w, h), aspect, w, h).unwrap().rect;
            contained += crop.contains(&rect) as usize;
            bounded += crop.within(w, h) as usize;
            matched += aspect_within_one_px(&crop, aspect) as usize;
        }
        (
            contained == 1000 && bounded == 1000 && matched == 1000,
            format!("1000 triples: contains box {contained}, in bounds {bounded}, aspect ±1px {matched}"),
        )
    })
}
