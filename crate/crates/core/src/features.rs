//! Frame sampling, the feature tensor file format, and a deterministic
//! color-histogram extractor that stands in for pretrained ConvNets.
//!
//! Feature files (`.ften`) are laid out as:
//!
//! ```text
//! b"FTEN" | n_vectors: u32 LE | dim: u32 LE | n_vectors*dim f32 LE, row-major
//! ```

use std::fs;
use std::path::Path;

use thiserror::Error;

use crate::augment::{ppm, AugmentError, FrameImage};

pub const DEFAULT_STRIDE: usize = 5;
const MAGIC: &[u8; 4] = b"FTEN";

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("malformed tensor file: {0}")]
    MalformedTensorFile(String),
    #[error("invalid feature sequence: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Frames(#[from] AugmentError),
}

/// Ordered, equally sized frames of one video.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoFrames {
    video_id: String,
    frames: Vec<FrameImage>,
}

impl VideoFrames {
    /// `None` if `frames` is empty or the frames differ in size.
    pub fn new(video_id: impl Into<String>, frames: Vec<FrameImage>) -> Option<VideoFrames> {
        let first = frames.first()?;
        let (w, h) = (first.width(), first.height());
        if frames.iter().any(|f| f.width() != w || f.height() != h) {
            return None;
        }
        Some(VideoFrames {
            video_id: video_id.into(),
            frames,
        })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn frames(&self) -> &[FrameImage] {
        &self.frames
    }

    /// Reads every `.ppm` file of `dir`, in name order. The directory name is
    /// the video id.
    pub fn read_dir(dir: &Path) -> Result<VideoFrames, FeatureError> {
        let id = dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let frames = ppm::frame_paths(dir)?
            .iter()
            .map(|p| ppm::read(p))
            .collect::<Result<Vec<_>, _>>()?;
        VideoFrames::new(id, frames)
            .ok_or_else(|| FeatureError::Invalid(format!("{}: no frames or mixed frame sizes", dir.display())))
    }

    /// Writes frames as zero-padded `.ppm` files into `dir` (created).
    pub fn write_dir(&self, dir: &Path) -> Result<(), FeatureError> {
        fs::create_dir_all(dir)?;
        for (i, frame) in self.frames.iter().enumerate() {
            ppm::write(&dir.join(ppm::frame_name(i)), frame)?;
        }
        Ok(())
    }
}

/// Per-frame feature vectors of one video.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    video_id: String,
    dim: usize,
    vectors: Vec<Vec<f32>>,
}

impl FeatureSequence {
    pub fn new(video_id: impl Into<String>, vectors: Vec<Vec<f32>>) -> Result<FeatureSequence, FeatureError> {
        let dim = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| FeatureError::Invalid("no vectors".into()))?;
        if dim == 0 {
            return Err(FeatureError::Invalid("zero dimension".into()));
        }
        if vectors.iter().any(|v| v.len() != dim) {
            return Err(FeatureError::Invalid("vectors differ in length".into()));
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(FeatureError::Invalid("non-finite value".into()));
        }
        Ok(FeatureSequence {
            video_id: video_id.into(),
            dim,
            vectors,
        })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[Vec<f32>] {
        &self.vectors
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|v| v.iter().map(|&x| f64::from(x)).collect())
            .collect()
    }
}

/// `0, stride, 2*stride, ...` below `n_frames`.
pub fn sample_frame_indices(n_frames: usize, stride: usize) -> Vec<usize> {
    assert!(stride >= 1, "stride must be positive");
    (0..n_frames).step_by(stride).collect()
}

/// Bits of joint-color quantization per channel for a histogram with at
/// most `bins` bins: bits are dealt round-robin to R, G, B.
fn channel_bits(bins: usize) -> [u32; 3] {
    let total = usize::BITS - 1 - bins.leading_zeros();
    let mut bits = [0u32; 3];
    for k in 0..total {
        bits[(k % 3) as usize] += 1;
    }
    bits
}

fn color_bin(rgb: [u8; 3], bits: [u32; 3]) -> usize {
    let q = |v: u8, b: u32| if b == 0 { 0 } else { usize::from(v >> (8 - b)) };
    (q(rgb[0], bits[0]) << (bits[1] + bits[2])) | (q(rgb[1], bits[1]) << bits[2]) | q(rgb[2], bits[2])
}

/// Descriptor of one frame: the frame is split into a 2x2 grid and each
/// cell contributes an L2-normalized joint RGB histogram of `dim/4` bins.
/// Bin 0 is the darkest color; bins beyond the largest power of two that
/// fits in `dim/4` stay empty.
pub fn frame_descriptor(frame: &FrameImage, dim: usize) -> Vec<f32> {
    assert!(dim >= 8 && dim.is_multiple_of(4), "dim must be >= 8 and divisible by 4");
    let bins = dim / 4;
    let bits = channel_bits(bins);
    let (w, h) = (frame.width(), frame.height());
    let (mx, my) = (w / 2, h / 2);
    let mut out = Vec::with_capacity(dim);
    for (y0, y1) in [(0, my), (my, h)] {
        for (x0, x1) in [(0, mx), (mx, w)] {
            let mut hist = vec![0.0f64; bins];
            for y in y0..y1 {
                for x in x0..x1 {
                    hist[color_bin(frame.pixel(x, y), bits)] += 1.0;
                }
            }
            let norm = hist.iter().map(|c| c * c).sum::<f64>().sqrt();
            if norm > 0.0 {
                hist.iter_mut().for_each(|c| *c /= norm);
            }
            out.extend(hist.into_iter().map(|c| c as f32));
        }
    }
    out
}

/// Deterministic stand-in extractor: one [`frame_descriptor`] per sampled frame.
pub fn stub_extract(video: &VideoFrames, stride: usize, dim: usize) -> FeatureSequence {
    let vectors = sample_frame_indices(video.frames().len(), stride)
        .into_iter()
        .map(|i| frame_descriptor(&video.frames()[i], dim))
        .collect();
    FeatureSequence::new(video.video_id(), vectors).expect("descriptors are finite and nonempty")
}

pub fn encode_features(seq: &FeatureSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * seq.len() * seq.dim);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(seq.len() as u32).to_le_bytes());
    out.extend_from_slice(&(seq.dim as u32).to_le_bytes());
    for x in seq.vectors.iter().flatten() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode_features(bytes: &[u8], video_id: &str) -> Result<FeatureSequence, FeatureError> {
    let bad = |s: &str| FeatureError::MalformedTensorFile(s.to_string());
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(bad("missing FTEN header"));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes")) as usize;
    let (n, dim) = (word(4), word(8));
    if n == 0 || dim == 0 {
        return Err(bad("zero vectors or zero dimension"));
    }
    let expected = n
        .checked_mul(dim)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(12))
        .ok_or_else(|| bad("header sizes overflow"))?;
    if bytes.len() != expected {
        return Err(bad(&format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let values: Vec<f32> = bytes[12..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    let vectors = values.chunks_exact(dim).map(<[f32]>::to_vec).collect();
    FeatureSequence::new(video_id, vectors).map_err(|e| bad(&e.to_string()))
}

pub fn write_features(path: &Path, seq: &FeatureSequence) -> Result<(), FeatureError> {
    fs::write(path, encode_features(seq))?;
    Ok(())
}

/// The file stem becomes the video id.
pub fn read_features(path: &Path) -> Result<FeatureSequence, FeatureError> {
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    decode_features(&fs::read(path)?, &id)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::brightness;
    use proptest::prelude::*;

    #[test]
    fn sampling_examples() {
        assert_eq!(sample_frame_indices(12, 5), [0, 5, 10]);
        assert_eq!(sample_frame_indices(1, 5), [0]);
        assert_eq!(sample_frame_indices(5, 1), [0, 1, 2, 3, 4]);
    }

    #[test]
    fn black_frame_is_one_hot_per_cell() {
        let f = FrameImage::filled(6, 6, [0, 0, 0]);
        let d = frame_descriptor(&f, 16);
        for cell in d.chunks(4) {
            assert_eq!(cell, [1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn identical_frames_identical_vectors() {
        let f = FrameImage::from_fn(8, 8, |x, y| [(x * 30) as u8, (y * 30) as u8, 77]);
        let v = VideoFrames::new("v", vec![f.clone(); 11]).unwrap();
        let s = stub_extract(&v, 5, 32);
        assert_eq!(s.len(), 3);
        assert!(s.vectors().iter().all(|x| x == &s.vectors()[0]));
    }

    #[test]
    fn brightness_changes_histogram() {
        let f = FrameImage::from_fn(8, 8, |x, y| [(x * 12) as u8, (y * 12) as u8, 40]);
        assert_ne!(frame_descriptor(&f, 32), frame_descriptor(&brightness(&f, 2.0), 32));
    }

    #[test]
    fn one_pixel_frame_leaves_empty_cells() {
        let f = FrameImage::filled(1, 1, [255, 255, 255]);
        let d = frame_descriptor(&f, 8);
        assert_eq!(d.iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn bit_allocation() {
        assert_eq!(channel_bits(2), [1, 0, 0]);
        assert_eq!(channel_bits(4), [1, 1, 0]);
        assert_eq!(channel_bits(8), [1, 1, 1]);
        assert_eq!(channel_bits(12), [1, 1, 1]);
        assert_eq!(channel_bits(16), [2, 1, 1]);
        assert_eq!(color_bin([255, 255, 255], [1, 1, 1]), 7);
    }

    #[test]
    fn malformed_files() {
        let seq = FeatureSequence::new("v", vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let bytes = encode_features(&seq);
        assert!(matches!(
            decode_features(&bytes[..bytes.len() - 1], "v"),
            Err(FeatureError::MalformedTensorFile(_))
        ));
        let mut zero_dim = bytes.clone();
        zero_dim[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(
            decode_features(&zero_dim, "v"),
            Err(FeatureError::MalformedTensorFile(_))
        ));
        let mut bad_magic = bytes;
        bad_magic[0] = b'X';
        assert!(matches!(
            decode_features(&bad_magic, "v"),
            Err(FeatureError::MalformedTensorFile(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip7.ften");
        let seq = FeatureSequence::new("clip7", vec![vec![0.1, -2.5e-7, 3.0]]).unwrap();
        write_features(&path, &seq).unwrap();
        assert_eq!(read_features(&path).unwrap(), seq);
    }

    proptest! {
        #[test]
        fn sampling_length(n in 1usize..500, stride in 1usize..20) {
            prop_assert_eq!(sample_frame_indices(n, stride).len(), n.div_ceil(stride));
        }

        #[test]
        fn encode_round_trip_bit_exact(vals in prop::collection::vec(prop::num::f32::NORMAL | prop::num::f32::SUBNORMAL | prop::num::f32::ZERO, 1..40), dim in 1usize..5) {
            let n = vals.len() / dim;
            prop_assume!(n > 0);
            let vectors: Vec<Vec<f32>> = vals[..n * dim].chunks(dim).map(<[f32]>::to_vec).collect();
            let seq = FeatureSequence::new("x", vectors).unwrap();
            let back = decode_features(&encode_features(&seq), "x").unwrap();
            let bits = |s: &FeatureSequence| s.vectors().iter().flatten().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&seq), bits(&back));
        }

        #[test]
        fn cells_have_unit_norm(px in prop::collection::vec(any::<u8>(), 3 * 36)) {
            let f = FrameImage::new(6, 6, px).unwrap();
            let d = frame_descriptor(&f, 64);
            for cell in d.chunks(16) {
                let n: f64 = cell.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
                prop_assert!((n - 1.0).abs() < 1e-6);
            }
        }
    }
}
