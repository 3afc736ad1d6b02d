use proptest::prelude::*;

use storyboard_core::filters::{self, FilterKind};
use storyboard_core::imaging::resize;
use storyboard_core::pipeline::{parse, serialize, validate};
use storyboard_core::procedural::{generate, ProcGenConfig, StyleRng};
use storyboard_core::selection::{hamming, Fingerprint};
use storyboard_core::storyboard::{best_crop, candidate_crops, DetectionBox, DetectionKind};
use storyboard_core::{Channels, ImageBuffer};
use storyboard_testkit::checks::{aspect_within_one_px, framing_case};
use storyboard_testkit::random_image;

proptest! {
    #[test]
    fn soft_threshold_is_monotone_and_saturates(phi in 0.013f64..0.059, eps in 50f64..110.0, a: u8, b: u8) {
        let (lo, hi) = (a.min(b), a.max(b));
        prop_assert!(filters::soft_threshold_value(lo, phi, eps) <= filters::soft_threshold_value(hi, phi, eps));
        if hi as f64 >= eps {
            prop_assert_eq!(filters::soft_threshold_value(hi, phi, eps), 255);
        }
    }

    #[test]
    fn posterize_uses_at_most_levels(seed: u64, levels in 2u32..=255) {
        let out = filters::posterize(&random_image(seed, 32), levels).unwrap();
        let mut seen = [false; 256];
        out.data().iter().for_each(|&v| seen[v as usize] = true);
        prop_assert!(seen.iter().filter(|&&s| s).count() <= levels as usize);
    }

    #[test]
    fn hamming_is_a_metric(a: u64, b: u64, c: u64) {
        let (a, b, c) = (Fingerprint(a), Fingerprint(b), Fingerprint(c));
        prop_assert_eq!(hamming(a, b), hamming(b, a));
        prop_assert!(hamming(a, c) <= hamming(a, b) + hamming(b, c));
        prop_assert!(hamming(a, b) <= 64);
    }

    #[test]
    fn smoothing_keeps_constant_images(v: u8, w in 1usize..20, h in 1usize..20, sigma in 0.3f64..6.0) {
        let img = ImageBuffer::filled(w, h, Channels::Rgb, v).unwrap();
        prop_assert_eq!(&filters::gaussian(&img, sigma).unwrap(), &img);
        prop_assert_eq!(&filters::tvf(&img, 5, 0.2, 0.255).unwrap(), &img);
        prop_assert_eq!(&filters::detail_control(&img, -50.0).unwrap(), &img);
    }

    #[test]
    fn resize_hits_target(seed: u64, w in 1usize..80, h in 1usize..80) {
        let out = resize(&random_image(seed, 64), w, h).unwrap();
        prop_assert_eq!(out.dimensions(), (w, h));
    }

    #[test]
    fn generated_styles_round_trip(seed: u64) {
        let cfg = ProcGenConfig { seed, count: 5, ..ProcGenConfig::default() };
        for style in generate(&cfg).unwrap() {
            prop_assert!(validate(&style).is_empty());
            let pool = style.background.iter().filter(|b| !matches!(b.kind(), FilterKind::ToGray | FilterKind::ToColor)).count();
            prop_assert!((4..=9).contains(&pool));
            let text = serialize(&style);
            prop_assert_eq!(serialize(&parse(&text).unwrap()), text);
        }
    }

    #[test]
    fn framing_keeps_feasible_boxes(seed: u64) {
        let (w, h, rect, aspect) = framing_case(&mut StyleRng::new(seed));
        let det = DetectionBox { image_id: "p".into(), rect, kind: DetectionKind::Face, confidence: 0.9 };
        let crop = best_crop(&candidate_crops(&det, w, h), aspect, w, h).unwrap().rect;
        prop_assert!(crop.contains(&rect));
        prop_assert!(crop.within(w, h));
        prop_assert!(aspect_within_one_px(&crop, aspect));
    }
}
