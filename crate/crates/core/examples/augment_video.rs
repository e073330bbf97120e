//! Applies every alteration of the training grid to a synthetic clip and
//! reports how far each one moves the frames.
//!
//!     cargo run --example augment_video

use capkit::augment::grid::{grid_plans, Grid};
use capkit::augment::{apply_plan, FrameImage};
use capkit::features::VideoFrames;

fn clip() -> VideoFrames {
    let frames = (0..4)
        .map(|t| {
            FrameImage::from_fn(48, 32, |x, y| {
                let r = (x * 5 + t * 20) % 256;
                let g = (y * 8) % 256;
                let b = if (x / 8 + y / 8) % 2 == 0 { 200 } else { 40 };
                [r as u8, g as u8, b]
            })
        })
        .collect();
    VideoFrames::new("clip", frames).expect("frames share a size")
}

fn mean_abs_diff(a: &VideoFrames, b: &VideoFrames) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for (fa, fb) in a.frames().iter().zip(b.frames()) {
        for (pa, pb) in fa.pixels().iter().zip(fb.pixels()) {
            total += (f64::from(*pa) - f64::from(*pb)).abs();
            n += 1;
        }
    }
    total / n as f64
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let video = clip();
    for grid in [Grid::Train, Grid::TestOnly] {
        println!("{grid:?}");
        for plan in grid_plans(grid, 7) {
            let altered = apply_plan(&video, &plan)?;
            println!(
                "  {:28} mean |diff| {:6.2}",
                plan.label(),
                mean_abs_diff(&video, &altered)
            );
        }
    }

    let plan = capkit::augment::AugmentationPlan::from_json(
        r#"[{"op": "grayscale"}, {"op": "keystone", "ratio": "5/2"}, {"op": "salt_pepper", "p": 0.05, "seed": 1}]"#,
    )?;
    let out = std::env::temp_dir().join("capkit_augment_example");
    apply_plan(&video, &plan)?.write_dir(&out)?;
    println!("{} -> {}", plan.label(), out.display());
    Ok(())
}
