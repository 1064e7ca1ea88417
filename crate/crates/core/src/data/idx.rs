use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{load_all, DatasetFormat, LoadOptions};
use crate::error::{Error, Result};
use crate::types::Dataset;

const UBYTE: u8 = 0x08;

/// Big-endian IDX images (magic `0x00000803`): unsigned bytes, three
/// dimensions `count × rows × cols`. Labels and other element types are
/// rejected.
#[derive(Clone, Copy, Debug, Default)]
pub struct Idx;

impl DatasetFormat for Idx {
    fn name(&self) -> &'static str {
        "idx"
    }

    fn load(&self, paths: &[PathBuf], _opts: &LoadOptions) -> Result<Dataset> {
        load_all(paths, |p| load_idx(p))
    }
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    parse_idx(&bytes, path)
}

fn parse_idx(bytes: &[u8], path: &Path) -> Result<Dataset> {
    if bytes.len() < 4 {
        return Err(Error::format(path, "truncated IDX header"));
    }
    if bytes[0] != 0 || bytes[1] != 0 {
        return Err(Error::format(
            path,
            format!(
                "bad IDX magic {:02x}{:02x}{:02x}{:02x}",
                bytes[0], bytes[1], bytes[2], bytes[3]
            ),
        ));
    }
    if bytes[2] != UBYTE {
        return Err(Error::format(
            path,
            format!(
                "unsupported IDX element type 0x{:02x}, expected unsigned byte",
                bytes[2]
            ),
        ));
    }
    if bytes[3] != 3 {
        return Err(Error::format(
            path,
            format!("unsupported IDX rank {}, expected 3-D images", bytes[3]),
        ));
    }
    if bytes.len() < 16 {
        return Err(Error::format(path, "truncated IDX header"));
    }
    let dim =
        |i: usize| u32::from_be_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (count, rows, cols) = (dim(0), dim(1), dim(2));
    let n = rows * cols;
    let body = &bytes[16..];
    let expected = count
        .checked_mul(n)
        .ok_or_else(|| Error::format(path, "IDX dimensions overflow"))?;
    if body.len() < expected {
        return Err(Error::format(
            path,
            format!("truncated IDX body: {} of {expected} bytes", body.len()),
        ));
    }
    if body.len() > expected {
        return Err(Error::format(
            path,
            format!("{} trailing bytes after IDX body", body.len() - expected),
        ));
    }
    let pixels: Vec<f64> = body.iter().map(|&b| b as f64 / 255.0).collect();
    let samples = Array2::from_shape_vec((count, n), pixels).expect("checked length");
    Dataset::new(samples, path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(magic: [u8; 4], dims: &[u32]) -> Vec<u8> {
        let mut v = magic.to_vec();
        for d in dims {
            v.extend_from_slice(&d.to_be_bytes());
        }
        v
    }

    #[test]
    fn parses_single_image() {
        let mut bytes = header([0, 0, 8, 3], &[1, 2, 2]);
        bytes.extend_from_slice(&[0, 255, 128, 0]);
        let d = parse_idx(&bytes, Path::new("x")).unwrap();
        assert_eq!((d.m(), d.n()), (1, 4));
        assert_eq!(d.row(0)[..2], [0.0, 1.0]);
        assert!((d.row(0)[2] - 0.50196).abs() < 1e-5);
        assert_eq!(d.row(0)[2], 128.0 / 255.0);
    }

    #[test]
    fn rejects_labels_and_bad_files() {
        let mut labels = header([0, 0, 8, 1], &[2]);
        labels.extend_from_slice(&[3, 4]);
        let err = parse_idx(&labels, Path::new("x")).unwrap_err();
        assert!(err.to_string().contains("unsupported"));

        assert!(parse_idx(&[], Path::new("x"))
            .unwrap_err()
            .to_string()
            .contains("truncated"));
        let float = header([0, 0, 0x0d, 3], &[1, 1, 1]);
        assert!(parse_idx(&float, Path::new("x"))
            .unwrap_err()
            .to_string()
            .contains("element type"));
        let bad = header([1, 0, 8, 3], &[1, 1, 1]);
        assert!(parse_idx(&bad, Path::new("x"))
            .unwrap_err()
            .to_string()
            .contains("magic"));

        let mut short = header([0, 0, 8, 3], &[2, 2, 2]);
        short.extend_from_slice(&[1, 2, 3]);
        assert!(parse_idx(&short, Path::new("x"))
            .unwrap_err()
            .to_string()
            .contains("truncated"));
        let short_header = vec![0, 0, 8, 3, 0, 0];
        assert!(parse_idx(&short_header, Path::new("x")).is_err());
    }
}
