//! Corpus-level properties of selection, filters, procedural styles and framing.

use storyboard_testkit::checks;

fn assert_passed(o: checks::Outcome) {
    println!("{o}");
    assert!(o.passed, "{o}");
}

#[test]
fn formula_spot_checks() {
    assert_passed(checks::formula_spot_checks());
}

#[test]
fn tvf_total_variation_never_increases() {
    assert_passed(checks::tv_monotonicity());
}

#[test]
fn hash_is_stable_under_blur_and_separates_scenes() {
    assert_passed(checks::hash_properties());
}

#[test]
fn sharpness_drops_along_blur_chain() {
    assert_passed(checks::sharpness_ordering());
}

#[test]
fn procedural_styles_follow_distribution() {
    assert_passed(checks::procedural_distribution());
}

#[test]
fn framing_contains_box_with_panel_aspect() {
    assert_passed(checks::framing());
}
