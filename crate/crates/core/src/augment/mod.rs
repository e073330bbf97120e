//! Frame-level visual alterations and the plans that chain them.
//!
//! Every transform maps an 8-bit RGB frame to a frame of the same size.
//! Intermediate values are rounded half away from zero and clamped after
//! each transform, so plans are integer-to-integer pipelines.

pub mod grid;
mod keystone;
mod noise;
mod ops;
pub mod ppm;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::features::VideoFrames;

pub use keystone::{keystone, keystone_homography, trapezoid_widths};
pub use noise::{counter_uniform, salt_pepper};
pub use ops::{brightness, contrast, gaussian_blur, gaussian_kernel, grayscale, luma, vertical_flip};

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("invalid transform: {0}")]
    InvalidTransform(String),
    #[error("malformed PPM {path}: {reason}")]
    MalformedPpm { path: String, reason: String },
    #[error("invalid plan file: {0}")]
    PlanFormat(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An 8-bit RGB raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct FrameImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl fmt::Debug for FrameImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FrameImage({}x{})", self.width, self.height)
    }
}

impl FrameImage {
    /// `pixels` holds `3 * width * height` channel values.
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Option<FrameImage> {
        if width == 0 || height == 0 || pixels.len() != 3 * width * height {
            return None;
        }
        Some(FrameImage { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> FrameImage {
        assert!(width > 0 && height > 0);
        FrameImage {
            width,
            height,
            pixels: rgb.repeat(width * height),
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> [u8; 3]) -> FrameImage {
        assert!(width > 0 && height > 0);
        let mut pixels = Vec::with_capacity(3 * width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        FrameImage { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = 3 * (y * self.width + x);
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    /// Mean luma over all pixels.
    pub fn mean_luma(&self) -> f64 {
        let sum: f64 = self.pixels.chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).sum();
        sum / (self.width * self.height) as f64
    }
}

/// Positive rational `num/den`, kept exact so that `r` and `1/r` swap
/// trapezoid widths exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub fn new(num: u32, den: u32) -> Ratio {
        Ratio { num, den }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    pub fn recip(&self) -> Ratio {
        Ratio {
            num: self.den,
            den: self.num,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.num > 0 && self.den > 0
    }

    /// Nearest fraction with denominator ≤ 1000, if `x` is one to 1e-12.
    fn from_f64(x: f64) -> Option<Ratio> {
        if !(x > 0.0) || !x.is_finite() || x > f64::from(u32::MAX) {
            return None;
        }
        (1..=1000u32).find_map(|den| {
            let num = (x * f64::from(den)).round();
            ((num / f64::from(den) - x).abs() < 1e-12 && num >= 1.0).then(|| Ratio::new(num as u32, den))
        })
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Ratio {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let ratio = match s.split_once('/') {
            Some((n, d)) => Ratio::new(
                n.trim().parse().map_err(|e| format!("{s:?}: {e}"))?,
                d.trim().parse().map_err(|e| format!("{s:?}: {e}"))?,
            ),
            None => {
                let x: f64 = s.parse().map_err(|e| format!("{s:?}: {e}"))?;
                Ratio::from_f64(x).ok_or_else(|| format!("{s:?} is not a simple positive ratio"))?
            }
        };
        if ratio.is_valid() {
            Ok(ratio)
        } else {
            Err(format!("{s:?} must be positive"))
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Ratio {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(x) => Ratio::from_f64(x)
                .ok_or_else(|| serde::de::Error::custom(format!("{x} is not a simple positive ratio"))),
        }
    }
}

/// One step of an augmentation plan. Serialized as `{"op": "...", ...}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TransformSpec {
    Grayscale,
    VerticalFlip,
    GaussianBlur { rho: usize },
    Keystone { ratio: Ratio },
    Brightness { factor: f64 },
    Contrast { factor: f64 },
    SaltPepper { p: f64, seed: u64 },
}

impl TransformSpec {
    pub fn validate(&self) -> Result<(), AugmentError> {
        let bad = |msg: String| Err(AugmentError::InvalidTransform(msg));
        match *self {
            TransformSpec::GaussianBlur { rho } if rho < 1 => bad(format!("kernel size {rho} < 1")),
            TransformSpec::Keystone { ratio } if !ratio.is_valid() => {
                bad(format!("keystone ratio {ratio} must be positive"))
            }
            TransformSpec::Brightness { factor } | TransformSpec::Contrast { factor }
                if !(factor > 0.0 && factor.is_finite()) =>
            {
                bad(format!("factor {factor} must be positive and finite"))
            }
            TransformSpec::SaltPepper { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad(format!("probability {p} outside [0, 1]"))
            }
            _ => Ok(()),
        }
    }

    /// Applies the transform, which must already be valid.
    pub fn apply(&self, img: &FrameImage) -> FrameImage {
        match *self {
            TransformSpec::Grayscale => grayscale(img),
            TransformSpec::VerticalFlip => vertical_flip(img),
            TransformSpec::GaussianBlur { rho } => gaussian_blur(img, rho),
            TransformSpec::Keystone { ratio } => keystone(img, ratio),
            TransformSpec::Brightness { factor } => brightness(img, factor),
            TransformSpec::Contrast { factor } => contrast(img, factor),
            TransformSpec::SaltPepper { p, seed } => salt_pepper(img, p, seed),
        }
    }

    /// Short name used for output directories and plot labels.
    pub fn label(&self) -> String {
        match self {
            TransformSpec::Grayscale => "grayscale".into(),
            TransformSpec::VerticalFlip => "vertical_flip".into(),
            TransformSpec::GaussianBlur { rho } => format!("gaussian_blur_rho{rho}"),
            TransformSpec::Keystone { ratio } => format!("keystone_{}-{}", ratio.num, ratio.den),
            TransformSpec::Brightness { factor } => format!("brightness_x{factor}"),
            TransformSpec::Contrast { factor } => format!("contrast_x{factor}"),
            TransformSpec::SaltPepper { p, .. } => format!("salt_pepper_p{p}"),
        }
    }
}

/// Ordered list of transforms applied to every frame of a video.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AugmentationPlan {
    pub steps: Vec<TransformSpec>,
}

impl AugmentationPlan {
    pub fn new(steps: Vec<TransformSpec>) -> Result<AugmentationPlan, AugmentError> {
        let plan = AugmentationPlan { steps };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_json(text: &str) -> Result<AugmentationPlan, AugmentError> {
        let plan: AugmentationPlan = serde_json::from_str(text)?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn validate(&self) -> Result<(), AugmentError> {
        self.steps.iter().try_for_each(TransformSpec::validate)
    }

    pub fn label(&self) -> String {
        if self.steps.is_empty() {
            return "original".into();
        }
        self.steps
            .iter()
            .map(TransformSpec::label)
            .collect::<Vec<_>>()
            .join("+")
    }

    pub fn apply_frame(&self, img: &FrameImage) -> FrameImage {
        self.steps.iter().fold(img.clone(), |frame, step| step.apply(&frame))
    }
}

/// Runs every step of `plan` on every frame. Frames are processed in
/// parallel; the result is independent of scheduling.
pub fn apply_plan(video: &VideoFrames, plan: &AugmentationPlan) -> Result<VideoFrames, AugmentError> {
    plan.validate()?;
    let frames: Vec<FrameImage> = video.frames().par_iter().map(|f| plan.apply_frame(f)).collect();
    Ok(VideoFrames::new(video.video_id(), frames).expect("transforms preserve dimensions"))
}
