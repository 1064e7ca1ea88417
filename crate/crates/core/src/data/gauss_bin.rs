use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{load_all, DatasetFormat, LoadOptions};
use crate::error::{Error, Result};
use crate::types::Dataset;

pub const GAUSS_BIN_MAGIC: [u8; 8] = *b"GCONC1\0\0";
const HEADER_LEN: usize = 16;

/// `gauss-bin`: 8-byte magic, `u32` LE row count, `u32` LE dimension, then
/// row-major little-endian `f64`s.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussBin;

impl DatasetFormat for GaussBin {
    fn name(&self) -> &'static str {
        "gauss-bin"
    }

    fn load(&self, paths: &[PathBuf], _opts: &LoadOptions) -> Result<Dataset> {
        load_all(paths, |p| load_gauss_bin(p))
    }
}

pub fn encode_gauss_bin(data: &Dataset) -> Result<Vec<u8>> {
    let m = u32::try_from(data.m()).map_err(|_| Error::InvalidData("too many rows".into()))?;
    let n =
        u32::try_from(data.n()).map_err(|_| Error::InvalidData("dimension too large".into()))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * data.as_slice().len());
    out.extend_from_slice(&GAUSS_BIN_MAGIC);
    out.extend_from_slice(&m.to_le_bytes());
    out.extend_from_slice(&n.to_le_bytes());
    for v in data.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_gauss_bin(bytes: &[u8], path: &Path) -> Result<Dataset> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(path, "truncated gauss-bin header"));
    }
    if bytes[..8] != GAUSS_BIN_MAGIC {
        return Err(Error::format(path, "bad gauss-bin magic"));
    }
    let m = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    let body = &bytes[HEADER_LEN..];
    if body.len() != 8 * m * n {
        return Err(Error::format(
            path,
            format!(
                "body has {} bytes, expected {} for {m}×{n}",
                body.len(),
                8 * m * n
            ),
        ));
    }
    let values: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let samples = Array2::from_shape_vec((m, n), values).expect("checked length");
    Dataset::new(samples, path.display().to_string())
}

pub fn load_gauss_bin(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    decode_gauss_bin(&std::fs::read(path)?, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let d = Dataset::from_rows(vec![vec![1.5, -2.0]], "t").unwrap();
        let bytes = encode_gauss_bin(&d).unwrap();
        assert_eq!(&bytes[..8], b"GCONC1\0\0");
        assert_eq!(&bytes[8..16], &[1, 0, 0, 0, 2, 0, 0, 0]);
        assert_eq!(&bytes[16..24], &1.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 32);
    }

    #[test]
    fn rejects_corrupt_input() {
        let d = Dataset::from_rows(vec![vec![1.0, 2.0]], "t").unwrap();
        let mut bytes = encode_gauss_bin(&d).unwrap();
        assert!(decode_gauss_bin(&bytes[..20], Path::new("x")).is_err());
        assert!(decode_gauss_bin(&bytes[..10], Path::new("x")).is_err());
        bytes[0] = b'X';
        assert!(decode_gauss_bin(&bytes, Path::new("x")).is_err());
    }
}
