use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::FrameImage;

/// Words consumed per pixel: two 64-bit draws.
const WORDS_PER_PIXEL: u128 = 4;

fn row_rng(seed: u64, row: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row);
    rng
}

fn unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stateless uniform draw in [0, 1) keyed by `(seed, row, col, stream)`,
/// with `stream` 0 or 1. ChaCha8 keyed by `seed` supplies the bits: the
/// row selects the ChaCha stream and the column the position within it.
pub fn counter_uniform(seed: u64, row: u64, col: u64, stream: u64) -> f64 {
    assert!(stream < 2, "two draws per pixel");
    let mut rng = row_rng(seed, row);
    rng.set_word_pos(u128::from(col) * WORDS_PER_PIXEL + u128::from(stream) * 2);
    unit(rng.next_u64())
}

/// Monochrome salt & pepper: each pixel is hit with probability `p`, and
/// a hit pixel becomes white or black with equal odds. The decision for a
/// pixel depends only on `(seed, row, col)` and equals the one made from
/// [`counter_uniform`].
pub fn salt_pepper(img: &FrameImage, p: f64, seed: u64) -> FrameImage {
    let mut out = img.clone();
    for y in 0..img.height {
        let mut rng = row_rng(seed, y as u64);
        for x in 0..img.width {
            let hit = unit(rng.next_u64());
            let color = unit(rng.next_u64());
            if hit < p {
                let v = if color < 0.5 { 255 } else { 0 };
                out.set_pixel(x, y, [v, v, v]);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gray(w: usize, h: usize) -> FrameImage {
        FrameImage::filled(w, h, [128, 128, 128])
    }

    #[test]
    fn zero_probability_is_identity() {
        let img = gray(10, 10);
        assert_eq!(salt_pepper(&img, 0.0, 3), img);
    }

    #[test]
    fn full_probability_hits_every_pixel() {
        let out = salt_pepper(&gray(20, 20), 1.0, 3);
        assert!(out
            .pixels()
            .chunks_exact(3)
            .all(|p| p == [0, 0, 0] || p == [255, 255, 255]));
    }

    #[test]
    fn altered_fraction_is_binomial() {
        let (w, h, p) = (256usize, 256usize, 0.1);
        let n = (w * h) as f64;
        let tol = 3.0 * (p * (1.0 - p) / n).sqrt();
        for seed in 0..5 {
            let out = salt_pepper(&gray(w, h), p, seed);
            let altered = out.pixels().chunks_exact(3).filter(|px| px[0] != 128).count() as f64;
            assert!((altered / n - p).abs() <= tol, "seed {seed}: {}", altered / n);
        }
    }

    #[test]
    fn salt_and_pepper_balanced() {
        let out = salt_pepper(&gray(200, 200), 1.0, 11);
        let white = out.pixels().chunks_exact(3).filter(|px| px[0] == 255).count() as f64;
        assert!((white / 40_000.0 - 0.5).abs() < 3.0 * (0.25f64 / 40_000.0).sqrt());
    }

    #[test]
    fn sequential_rows_match_counter_draws() {
        let out = salt_pepper(&gray(9, 4), 0.4, 21);
        for y in 0..4 {
            for x in 0..9 {
                let hit = counter_uniform(21, y as u64, x as u64, 0) < 0.4;
                let white = counter_uniform(21, y as u64, x as u64, 1) < 0.5;
                let want = match (hit, white) {
                    (false, _) => [128; 3],
                    (true, true) => [255; 3],
                    (true, false) => [0; 3],
                };
                assert_eq!(out.pixel(x, y), want);
            }
        }
    }

    #[test]
    fn uniform_range() {
        for i in 0..1000 {
            let u = counter_uniform(i, i * 3, i * 7, 0);
            assert!((0.0..1.0).contains(&u));
        }
    }
}
