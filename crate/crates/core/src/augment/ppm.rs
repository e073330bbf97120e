//! Binary PPM (P6, maxval 255) frames, one file per frame.

use std::fs;
use std::path::{Path, PathBuf};

use super::{AugmentError, FrameImage};

pub fn encode(img: &FrameImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn decode(bytes: &[u8], origin: &str) -> Result<FrameImage, AugmentError> {
    let bad = |reason: &str| AugmentError::MalformedPpm {
        path: origin.to_string(),
        reason: reason.to_string(),
    };
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // whitespace and comments
        while pos < bytes.len() {
            if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ascii header"))?);
    }
    if fields[0] != "P6" {
        return Err(bad("not a binary PPM (P6)"));
    }
    let parse = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (width, height, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let len = 3 * width * height;
    if bytes.len() < pos + len {
        return Err(bad("truncated raster"));
    }
    FrameImage::new(width, height, bytes[pos..pos + len].to_vec()).ok_or_else(|| bad("zero dimension"))
}

pub fn read(path: &Path) -> Result<FrameImage, AugmentError> {
    decode(&fs::read(path)?, &path.display().to_string())
}

pub fn write(path: &Path, img: &FrameImage) -> Result<(), AugmentError> {
    fs::write(path, encode(img))?;
    Ok(())
}

/// `.ppm` files of a directory in name order.
pub fn frame_paths(dir: &Path) -> Result<Vec<PathBuf>, AugmentError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")))
        .collect();
    paths.sort();
    Ok(paths)
}

/// Zero-padded frame file name, e.g. `000042.ppm`.
pub fn frame_name(index: usize) -> String {
    format!("{index:06}.ppm")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let img = FrameImage::from_fn(5, 3, |x, y| [x as u8, y as u8, 200]);
        assert_eq!(decode(&encode(&img), "mem").unwrap(), img);
    }

    #[test]
    fn header_with_comment() {
        let mut bytes = b"P6\n# made by hand\n1 1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(decode(&bytes, "mem").unwrap().pixel(0, 0), [1, 2, 3]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(decode(b"P3\n1 1\n255\n1 2 3", "mem").is_err());
        assert!(decode(b"P6\n2 2\n255\n\x01\x02", "mem").is_err());
        assert!(decode(b"P6\n2", "mem").is_err());
        assert!(decode(b"P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00", "mem").is_err());
    }
}
