//! Stub feature extraction: one color-histogram descriptor per sampled frame.
//!
//!     cargo run --example extract_features

use capkit::augment::{gaussian_blur, FrameImage};
use capkit::features::{decode_features, encode_features, sample_frame_indices, stub_extract, VideoFrames};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frames: Vec<FrameImage> = (0..23)
        .map(|t| {
            FrameImage::from_fn(16, 16, |x, y| {
                let on = (x + y + t) % 2 == 0;
                if on {
                    [250, 240, (t * 11) as u8]
                } else {
                    [10, 20, 30]
                }
            })
        })
        .collect();
    let video = VideoFrames::new("checker", frames.clone()).expect("same size");
    println!("frames kept with stride 5: {:?}", sample_frame_indices(23, 5));

    let seq = stub_extract(&video, 5, 32);
    println!("{} vectors of dim {}", seq.len(), seq.dim());
    println!("first vector: {:?}", &seq.vectors()[0][..8]);

    let blurred =
        VideoFrames::new("checker_blur", frames.iter().map(|f| gaussian_blur(f, 7)).collect()).expect("same size");
    let other = stub_extract(&blurred, 5, 32);
    let dist: f32 = seq.vectors()[0]
        .iter()
        .zip(&other.vectors()[0])
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f32>()
        .sqrt();
    println!("distance to blurred copy: {dist:.4}");

    let bytes = encode_features(&seq);
    let back = decode_features(&bytes, "checker")?;
    assert_eq!(back, seq);
    println!("FTEN round trip: {} bytes", bytes.len());
    Ok(())
}
