//! Built-in severity grids: the alterations used to augment training
//! videos, and the extra ones reserved for testing only.

use std::str::FromStr;

use super::{AugmentationPlan, Ratio, TransformSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    Train,
    TestOnly,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Grid::Train),
            "test-only" | "test_only" | "test" => Ok(Grid::TestOnly),
            other => Err(format!("unknown grid {other:?} (expected train or test-only)")),
        }
    }
}

pub const TRAIN_BLUR: [usize; 3] = [12, 15, 17];
pub const TEST_BLUR: [usize; 4] = [5, 7, 10, 20];
pub const TRAIN_KEYSTONE: [(u32, u32); 4] = [(5, 2), (3, 1), (2, 5), (1, 3)];
pub const TEST_KEYSTONE: [(u32, u32); 4] = [(3, 2), (2, 1), (2, 3), (1, 2)];
pub const TRAIN_BRIGHTNESS: [f64; 2] = [2.0, 0.2];
pub const TEST_BRIGHTNESS: [f64; 4] = [5.0, 7.0, 0.5, 0.7];
pub const TRAIN_SALT_PEPPER: [f64; 3] = [0.01, 0.05, 0.1];
pub const TEST_SALT_PEPPER: [f64; 2] = [0.5, 0.7];
pub const TEST_CONTRAST: [f64; 2] = [2.0, 0.5];

/// One single-transform plan per grid entry. Noise entries use `seed`.
pub fn grid_plans(grid: Grid, seed: u64) -> Vec<AugmentationPlan> {
    let mut steps = Vec::new();
    match grid {
        Grid::Train => {
            steps.push(TransformSpec::Grayscale);
            steps.extend(TRAIN_BLUR.map(|rho| TransformSpec::GaussianBlur { rho }));
            steps.extend(TRAIN_KEYSTONE.map(|(n, d)| TransformSpec::Keystone {
                ratio: Ratio::new(n, d),
            }));
            steps.extend(TRAIN_BRIGHTNESS.map(|factor| TransformSpec::Brightness { factor }));
            steps.extend(TRAIN_SALT_PEPPER.map(|p| TransformSpec::SaltPepper { p, seed }));
        }
        Grid::TestOnly => {
            steps.push(TransformSpec::VerticalFlip);
            steps.extend(TEST_BLUR.map(|rho| TransformSpec::GaussianBlur { rho }));
            steps.extend(TEST_KEYSTONE.map(|(n, d)| TransformSpec::Keystone {
                ratio: Ratio::new(n, d),
            }));
            steps.extend(TEST_BRIGHTNESS.map(|factor| TransformSpec::Brightness { factor }));
            steps.extend(TEST_SALT_PEPPER.map(|p| TransformSpec::SaltPepper { p, seed }));
            steps.extend(TEST_CONTRAST.map(|factor| TransformSpec::Contrast { factor }));
        }
    }
    steps.into_iter().map(|s| AugmentationPlan { steps: vec![s] }).collect()
}
