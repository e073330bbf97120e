//! Keystone distortion: the frame is warped onto a horizontally centered
//! trapezoid whose longer parallel side spans the full width.
//!
//! Pixel `(x, y)` has its center at `(x, y)`; the frame covers
//! `[-0.5, w-0.5] x [-0.5, h-0.5]`. Destination pixels are inverse-mapped
//! through the homography and bilinearly sampled; pixels whose centers lie
//! outside the trapezoid are black.

use super::ops::to_u8;
use super::{FrameImage, Ratio};

/// Top and bottom widths of the destination trapezoid.
pub fn trapezoid_widths(width: usize, ratio: Ratio) -> (f64, f64) {
    let w = width as f64;
    if ratio.num >= ratio.den {
        (w, w * f64::from(ratio.den) / f64::from(ratio.num))
    } else {
        (w * f64::from(ratio.num) / f64::from(ratio.den), w)
    }
}

type Mat3 = [[f64; 3]; 3];

fn mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn invert(m: &Mat3) -> Mat3 {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    adj.map(|row| row.map(|v| v / det))
}

/// Projective map of the unit square onto the quad `p[0..4]`
/// (corners in order (0,0), (1,0), (1,1), (0,1)).
fn square_to_quad(p: [(f64, f64); 4]) -> Mat3 {
    let [(x0, y0), (x1, y1), (x2, y2), (x3, y3)] = p;
    let sx = x0 - x1 + x2 - x3;
    let sy = y0 - y1 + y2 - y3;
    let (dx1, dx2, dy1, dy2) = (x1 - x2, x3 - x2, y1 - y2, y3 - y2);
    let den = dx1 * dy2 - dx2 * dy1;
    let g = (sx * dy2 - dx2 * sy) / den;
    let h = (dx1 * sy - sx * dy1) / den;
    [
        [x1 - x0 + g * x1, x3 - x0 + h * x3, x0],
        [y1 - y0 + g * y1, y3 - y0 + h * y3, y0],
        [g, h, 1.0],
    ]
}

/// Homography taking source frame coordinates to destination coordinates.
pub fn keystone_homography(width: usize, height: usize, ratio: Ratio) -> [[f64; 3]; 3] {
    let (w, h) = (width as f64, height as f64);
    let (top, bottom) = trapezoid_widths(width, ratio);
    let cx = (w - 1.0) / 2.0;
    let quad = [
        (cx - top / 2.0, -0.5),
        (cx + top / 2.0, -0.5),
        (cx + bottom / 2.0, h - 0.5),
        (cx - bottom / 2.0, h - 0.5),
    ];
    let frame_to_square = [[1.0 / w, 0.0, 0.5 / w], [0.0, 1.0 / h, 0.5 / h], [0.0, 0.0, 1.0]];
    mul(&square_to_quad(quad), &frame_to_square)
}

/// Whether the center of pixel `(x, y)` lies inside the trapezoid, decided
/// in exact integer arithmetic so that `ratio` and its reciprocal give
/// vertically mirrored masks.
fn inside(x: usize, y: usize, width: usize, height: usize, ratio: Ratio) -> bool {
    let (w, h) = (width as i128, height as i128);
    let (num, den) = (i128::from(ratio.num), i128::from(ratio.den));
    let long = num.max(den);
    let offset = (2 * x as i128 - (w - 1)).abs();
    let lhs = offset * 2 * h * long;
    let rhs = 2 * h * w * num + w * (den - num) * (2 * y as i128 + 1);
    lhs <= rhs
}

fn bilinear(img: &FrameImage, u: f64, v: f64, c: usize) -> f64 {
    let u = u.clamp(0.0, (img.width - 1) as f64);
    let v = v.clamp(0.0, (img.height - 1) as f64);
    let (x0, y0) = (u.floor() as usize, v.floor() as usize);
    let (x1, y1) = ((x0 + 1).min(img.width - 1), (y0 + 1).min(img.height - 1));
    let (fx, fy) = (u - x0 as f64, v - y0 as f64);
    let at = |x: usize, y: usize| f64::from(img.pixels[3 * (y * img.width + x) + c]);
    let top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    let bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    top * (1.0 - fy) + bottom * fy
}

/// Warps `img` onto the trapezoid with `w_top / w_bottom = ratio`.
pub fn keystone(img: &FrameImage, ratio: Ratio) -> FrameImage {
    let inverse = invert(&keystone_homography(img.width, img.height, ratio));
    let mut out = FrameImage::filled(img.width, img.height, [0, 0, 0]);
    for y in 0..img.height {
        for x in 0..img.width {
            if !inside(x, y, img.width, img.height, ratio) {
                continue;
            }
            let (xf, yf) = (x as f64, y as f64);
            let z = inverse[2][0] * xf + inverse[2][1] * yf + inverse[2][2];
            let u = (inverse[0][0] * xf + inverse[0][1] * yf + inverse[0][2]) / z;
            let v = (inverse[1][0] * xf + inverse[1][1] * yf + inverse[1][2]) / z;
            let rgb = [0, 1, 2].map(|c| to_u8(bilinear(img, u, v, c)));
            out.set_pixel(x, y, rgb);
        }
    }
    out
}
