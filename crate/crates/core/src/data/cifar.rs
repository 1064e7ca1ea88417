use std::path::{Path, PathBuf};

use ndarray::Array2;

use super::{load_all, DatasetFormat, LoadOptions};
use crate::error::{Error, Result};
use crate::types::Dataset;

pub const CIFAR_PIXELS: usize = 3072;
/// One label byte followed by the pixels.
pub const CIFAR_RECORD: usize = CIFAR_PIXELS + 1;

/// CIFAR-10 binary batches. Labels are dropped.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cifar10;

impl DatasetFormat for Cifar10 {
    fn name(&self) -> &'static str {
        "cifar"
    }

    fn load(&self, paths: &[PathBuf], _opts: &LoadOptions) -> Result<Dataset> {
        load_cifar10(paths)
    }
}

pub fn load_cifar10(paths: &[PathBuf]) -> Result<Dataset> {
    load_all(paths, |p| load_one(p))
}

fn load_one(path: &Path) -> Result<Dataset> {
    let bytes = std::fs::read(path)?;
    if bytes.is_empty() || bytes.len() % CIFAR_RECORD != 0 {
        return Err(Error::format(
            path,
            format!(
                "length {} is not a positive multiple of the {CIFAR_RECORD}-byte record size",
                bytes.len()
            ),
        ));
    }
    let m = bytes.len() / CIFAR_RECORD;
    let mut pixels = Vec::with_capacity(m * CIFAR_PIXELS);
    for rec in bytes.chunks_exact(CIFAR_RECORD) {
        pixels.extend(rec[1..].iter().map(|&b| b as f64 / 255.0));
    }
    let samples = Array2::from_shape_vec((m, CIFAR_PIXELS), pixels).expect("checked length");
    Dataset::new(samples, path.display().to_string())
}
