use storyboard_core::imaging::io::encode_png;
use storyboard_core::pipeline::bundled_styles;
use storyboard_core::storyboard::{bundled_layouts, select_frames, storyboards, Frame, DEFAULT_PAGE_WIDTH};
use storyboard_core::synth;

fn frames() -> Vec<Frame> {
    synth::video_frames(7, 16, 320, 180)
        .into_iter()
        .enumerate()
        .map(|(i, img)| Frame::new(format!("frame-{i:02}"), img))
        .collect()
}

#[test]
fn paused_frame_is_dropped() {
    let kept = select_frames(frames()).unwrap();
    let paused = kept.iter().filter(|f| f.id == "frame-07" || f.id == "frame-08").count();
    assert_eq!(paused, 1);
    assert!(kept.len() > 8);
    assert!(kept.windows(2).all(|p| p[0].id < p[1].id));
}

#[test]
fn pages_are_reproducible() {
    let (layouts, styles) = (bundled_layouts(), bundled_styles());
    let a = storyboards(frames(), &layouts, &styles, 3, 42, 640).unwrap();
    let b = storyboards(frames(), &layouts, &styles, 3, 42, 640).unwrap();
    assert_eq!(a.len(), 3);
    for (p, q) in a.iter().zip(&b) {
        assert_eq!(p.plan, q.plan);
        assert_eq!(encode_png(&p.image).unwrap(), encode_png(&q.image).unwrap());
        let layout = layouts.iter().find(|t| t.id == p.plan.layout_id).unwrap();
        assert_eq!(p.image.dimensions(), layout.page_size(640));
    }
    let other = storyboards(frames(), &layouts, &styles, 3, 43, 640).unwrap();
    assert!(a.iter().zip(&other).any(|(p, q)| p.plan != q.plan));
}

#[test]
fn empty_input_is_rejected() {
    let err = storyboards(Vec::new(), &bundled_layouts(), &bundled_styles(), 2, 1, DEFAULT_PAGE_WIDTH).unwrap_err();
    assert!(err.to_string().contains("no images"));
}
