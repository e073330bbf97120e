use super::FrameImage;

const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

pub fn luma(r: u8, g: u8, b: u8) -> f64 {
    LUMA_WEIGHTS[0] * f64::from(r) + LUMA_WEIGHTS[1] * f64::from(g) + LUMA_WEIGHTS[2] * f64::from(b)
}

pub(crate) fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

fn map_channels(img: &FrameImage, f: impl Fn(u8) -> u8) -> FrameImage {
    FrameImage {
        width: img.width,
        height: img.height,
        pixels: img.pixels.iter().map(|&v| f(v)).collect(),
    }
}

/// Rounded luma replicated into all three channels.
pub fn grayscale(img: &FrameImage) -> FrameImage {
    let mut pixels = Vec::with_capacity(img.pixels.len());
    for p in img.pixels.chunks_exact(3) {
        let y = to_u8(luma(p[0], p[1], p[2]));
        pixels.extend_from_slice(&[y, y, y]);
    }
    FrameImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

/// Upside-down mirror: row order reversed.
pub fn vertical_flip(img: &FrameImage) -> FrameImage {
    let row = 3 * img.width;
    let pixels = img.pixels.chunks_exact(row).rev().flatten().copied().collect();
    FrameImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}

pub fn brightness(img: &FrameImage, factor: f64) -> FrameImage {
    map_channels(img, |v| to_u8(f64::from(v) * factor))
}

/// Scales every channel's distance from the image's mean luma.
pub fn contrast(img: &FrameImage, factor: f64) -> FrameImage {
    let mu = img.mean_luma();
    map_channels(img, |v| to_u8(mu + (f64::from(v) - mu) * factor))
}

/// Normalized 1-D Gaussian of length `rho`, sampled at offsets
/// `i - (rho-1)/2` with `sigma = 0.3*((rho-1)/2 - 1) + 0.8`.
pub fn gaussian_kernel(rho: usize) -> Vec<f64> {
    assert!(rho >= 1);
    let center = (rho as f64 - 1.0) / 2.0;
    let sigma = 0.3 * (center - 1.0) + 0.8;
    let raw: Vec<f64> = (0..rho)
        .map(|i| {
            let d = i as f64 - center;
            (-(d * d) / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Separable Gaussian blur with replicated borders: horizontal pass, then
/// vertical, rounded once at the end. Tap `i` of the kernel reads the pixel
/// at offset `i - rho/2` (integer division), which centers odd kernels;
/// even kernels lean half a pixel towards the origin.
pub fn gaussian_blur(img: &FrameImage, rho: usize) -> FrameImage {
    let kernel = gaussian_kernel(rho);
    let anchor = (rho / 2) as isize;
    let (w, h) = (img.width as isize, img.height as isize);
    let clamp = |v: isize, hi: isize| v.clamp(0, hi - 1) as usize;

    let mut horiz = vec![0.0f64; img.pixels.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (i, k) in kernel.iter().enumerate() {
                    let sx = clamp(x + i as isize - anchor, w);
                    acc += k * f64::from(img.pixels[3 * (y as usize * img.width + sx) + c]);
                }
                horiz[3 * (y as usize * img.width + x as usize) + c] = acc;
            }
        }
    }
    let mut pixels = vec![0u8; img.pixels.len()];
    for y in 0..h {
        for x in 0..w {
            for c in 0..3 {
                let mut acc = 0.0;
                for (i, k) in kernel.iter().enumerate() {
                    let sy = clamp(y + i as isize - anchor, h);
                    acc += k * horiz[3 * (sy * img.width + x as usize) + c];
                }
                pixels[3 * (y as usize * img.width + x as usize) + c] = to_u8(acc);
            }
        }
    }
    FrameImage {
        width: img.width,
        height: img.height,
        pixels,
    }
}
