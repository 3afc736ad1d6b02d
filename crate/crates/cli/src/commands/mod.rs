mod bench;
mod procgen;
mod select;
mod storyboard;
mod stylize;

pub use bench::{BenchArgs, BenchBlock, BenchReport};
pub use procgen::ProcgenArgs;
pub use select::SelectArgs;
pub use storyboard::{StoryboardArgs, StoryboardManifest};
pub use stylize::StylizeArgs;
