use storyboard_core::filters;
use storyboard_core::{Channels, ImageBuffer};
use storyboard_testkit::checks::{filter_oracle_diffs, oracle_tolerance};
use storyboard_testkit::{oracles, random_image};

#[test]
fn filters_match_references_on_random_images() {
    let worst = filter_oracle_diffs(100);
    assert_eq!(worst.len(), 8);
    for (name, diff) in worst {
        assert!(diff <= oracle_tolerance(name), "{name}: worst diff {diff}");
    }
}

#[test]
fn gaussian_impulse_matches_dense_convolution() {
    let img = ImageBuffer::from_fn(33, 33, Channels::Gray, |x, y, _| if (x, y) == (16, 16) { 255 } else { 0 }).unwrap();
    let got = filters::gaussian(&img, 2.0).unwrap();
    assert!(oracles::max_abs_diff(&got, &oracles::gaussian(&img, 2.0)) <= 1);
}

#[test]
fn luma_matches_reference() {
    for seed in 0..20 {
        let img = random_image(seed, 24);
        let ours = storyboard_core::imaging::luma_image(&img);
        let expected = oracles::luma(&img);
        assert!(ours.data().iter().zip(&expected).all(|(a, b)| *a as f64 == *b));
    }
}

#[test]
fn larger_images_match_too() {
    let img = storyboard_core::synth::scene(3, 64, 48);
    assert!(oracles::max_abs_diff(&filters::xdog(&img, 1.5, 20.0).unwrap(), &oracles::xdog(&img, 1.5, 20.0)) <= 1);
    assert!(oracles::max_abs_diff(&filters::tvf(&img, 10, 0.2, 0.255).unwrap(), &oracles::tvf(&img, 10, 0.2, 0.255)) <= 2);
    assert!(oracles::max_abs_diff(&filters::etf(&img, 4, 2).unwrap(), &oracles::etf(&img, 4, 2)) <= 2);
    assert!(oracles::max_abs_diff(&filters::detail_control(&img, 40.0).unwrap(), &oracles::detail_control(&img, 40.0)) <= 1);
}
