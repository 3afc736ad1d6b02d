//! Regenerates `fixtures/`: 16 video frames with ball detections and a larger
//! sample image. Run with `cargo run -p storyboard-cli --example make_fixtures`.

use std::fs;
use std::path::Path;

use storyboard_core::imaging::io::save_png;
use storyboard_core::storyboard::{detections_to_json, DetectionBox, DetectionKind, PixelRect};
use storyboard_core::synth;

pub const FRAME_SEED: u64 = 16;
pub const SAMPLE_SEED: u64 = 808;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let frames_dir = root.join("frames");
    fs::create_dir_all(&frames_dir)?;
    let (w, h) = (320, 180);
    for (i, frame) in synth::video_frames(FRAME_SEED, 16, w, h).iter().enumerate() {
        let name = format!("frame-{i:02}");
        save_png(frame, frames_dir.join(format!("{name}.png")))?;
        let (cx, cy, r) = synth::video_ball(i, w, h);
        let x0 = (cx - r).floor().clamp(0.0, w as f64) as usize;
        let y0 = (cy - r).floor().clamp(0.0, h as f64) as usize;
        let x1 = (cx + r).ceil().clamp(0.0, w as f64) as usize;
        let y1 = (cy + r).ceil().clamp(0.0, h as f64) as usize;
        if x1 > x0 && y1 > y0 {
            let ball = DetectionBox {
                image_id: format!("{name}.png"),
                rect: PixelRect::new(x0, y0, x1 - x0, y1 - y0),
                kind: DetectionKind::Object,
                confidence: 0.9,
            };
            fs::write(
                frames_dir.join(format!("{name}.detections.json")),
                detections_to_json(&ball.image_id, &[ball.clone()]) + "\n",
            )?;
        }
    }
    save_png(&synth::scene(SAMPLE_SEED, 800, 450), root.join("sample.png"))?;
    println!("fixtures written to {}", root.display());
    Ok(())
}
