//! Reference implementations for the frame transforms.

use capkit::augment::FrameImage;
use nalgebra::{SMatrix, SVector};
use rand::Rng;

pub fn random_image(rng: &mut impl Rng, w: usize, h: usize) -> FrameImage {
    FrameImage::from_fn(w, h, |_, _| [rng.random(), rng.random(), rng.random()])
}

/// Unnormalized Gaussian weights, summed to one at the end.
pub fn kernel(rho: usize) -> Vec<f64> {
    let center = (rho as f64 - 1.0) * 0.5;
    let sigma = 0.3 * (center - 1.0) + 0.8;
    let w: Vec<f64> = (0..rho)
        .map(|i| (-(i as f64 - center).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|v| v / s).collect()
}

/// Direct 2-D convolution with the outer-product kernel and replicated
/// borders, before rounding.
pub fn blur_2d(img: &FrameImage, rho: usize) -> Vec<f64> {
    let k = kernel(rho);
    let anchor = (rho / 2) as isize;
    let (w, h) = (img.width() as isize, img.height() as isize);
    let mut out = Vec::with_capacity(img.pixels().len());
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (dy, ky) in k.iter().enumerate() {
                    for (dx, kx) in k.iter().enumerate() {
                        let sx = (x + dx as isize - anchor).clamp(0, w - 1) as usize;
                        let sy = (y + dy as isize - anchor).clamp(0, h - 1) as usize;
                        acc += ky * kx * f64::from(img.pixel(sx, sy)[c]);
                    }
                }
                out.push(acc);
            }
        }
    }
    out
}

pub type Quad = [(f64, f64); 4];

/// Homography through four point correspondences, solved as an 8x8 linear
/// system with `h33 = 1`.
pub fn homography_from_points(src: Quad, dst: Quad) -> [[f64; 3]; 3] {
    let mut a = SMatrix::<f64, 8, 8>::zeros();
    let mut b = SVector::<f64, 8>::zeros();
    for k in 0..4 {
        let ((x, y), (u, v)) = (src[k], dst[k]);
        let r = 2 * k;
        a.row_mut(r)
            .copy_from_slice(&[x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]);
        a.row_mut(r + 1)
            .copy_from_slice(&[0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]);
        b[r] = u;
        b[r + 1] = v;
    }
    let s = a.lu().solve(&b).expect("non-degenerate quad");
    [[s[0], s[1], s[2]], [s[3], s[4], s[5]], [s[6], s[7], 1.0]]
}

/// Expected keystone corners: the frame edges at `±0.5` mapped onto a
/// centered trapezoid with the longer side spanning the full width.
pub fn keystone_corners(w: usize, h: usize, num: u32, den: u32) -> (Quad, Quad) {
    let (wf, hf) = (w as f64, h as f64);
    let r = f64::from(num) / f64::from(den);
    let (top, bottom) = if r >= 1.0 { (wf, wf / r) } else { (wf * r, wf) };
    let cx = (wf - 1.0) / 2.0;
    let src = [(-0.5, -0.5), (wf - 0.5, -0.5), (wf - 0.5, hf - 0.5), (-0.5, hf - 0.5)];
    let dst = [
        (cx - top / 2.0, -0.5),
        (cx + top / 2.0, -0.5),
        (cx + bottom / 2.0, hf - 0.5),
        (cx - bottom / 2.0, hf - 0.5),
    ];
    (src, dst)
}

/// Number of pixels whose value differs between the two images.
pub fn changed_pixels(a: &FrameImage, b: &FrameImage) -> usize {
    a.pixels()
        .chunks_exact(3)
        .zip(b.pixels().chunks_exact(3))
        .filter(|(p, q)| p != q)
        .count()
}
