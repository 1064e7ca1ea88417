//! Dataset ingestion and synthetic Gaussian sampling.
//!
//! File formats are [`DatasetFormat`] implementations looked up by name in
//! a [`FormatRegistry`]. Image formats scale pixels to `[0, 1]`; CSV and
//! `gauss-bin` are loaded as-is.

mod cifar;
mod csv_format;
mod gauss_bin;
mod gaussian;
mod idx;

use std::path::PathBuf;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::types::Dataset;

pub use cifar::{load_cifar10, Cifar10, CIFAR_PIXELS, CIFAR_RECORD};
pub use csv_format::{load_csv, Csv};
pub use gauss_bin::{
    decode_gauss_bin, encode_gauss_bin, load_gauss_bin, GaussBin, GAUSS_BIN_MAGIC,
};
pub use gaussian::sample_gaussian;
pub use idx::{load_idx, Idx};

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Skip the first CSV line.
    pub csv_header: bool,
}

/// A file format that yields a [`Dataset`]. Multiple paths are concatenated
/// row-wise in order.
pub trait DatasetFormat: Send + Sync {
    fn name(&self) -> &'static str;

    fn load(&self, paths: &[PathBuf], opts: &LoadOptions) -> Result<Dataset>;
}

#[derive(Clone)]
pub struct FormatRegistry {
    formats: Vec<Arc<dyn DatasetFormat>>,
}

impl FormatRegistry {
    pub fn empty() -> Self {
        Self {
            formats: Vec::new(),
        }
    }

    /// `idx`, `cifar`, `csv` and `gauss-bin`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(Idx));
        r.register(Arc::new(Cifar10));
        r.register(Arc::new(Csv));
        r.register(Arc::new(GaussBin));
        r
    }

    pub fn register(&mut self, format: Arc<dyn DatasetFormat>) {
        self.formats.retain(|f| f.name() != format.name());
        self.formats.push(format);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn DatasetFormat>> {
        self.formats
            .iter()
            .find(|f| f.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "dataset format",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.formats.iter().map(|f| f.name()).collect()
    }

    pub fn load(&self, name: &str, paths: &[PathBuf], opts: &LoadOptions) -> Result<Dataset> {
        self.get(name)?.load(paths, opts)
    }
}

impl Default for FormatRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Loads each path with `load_one` and stacks the results.
pub(crate) fn load_all(
    paths: &[PathBuf],
    load_one: impl Fn(&PathBuf) -> Result<Dataset>,
) -> Result<Dataset> {
    match paths {
        [] => Err(Error::InvalidData("no input files given".into())),
        [one] => load_one(one),
        many => {
            let parts = many.iter().map(&load_one).collect::<Result<Vec<_>>>()?;
            let source = many
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(",");
            Dataset::concat(parts, source)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_and_lookup() {
        let r = FormatRegistry::with_builtins();
        assert_eq!(r.names(), vec!["idx", "cifar", "csv", "gauss-bin"]);
        assert!(r.get("gauss-bin").is_ok());
        assert!(matches!(r.get("png"), Err(Error::UnknownStrategy { .. })));
    }

    #[test]
    fn no_paths_is_an_error() {
        assert!(FormatRegistry::with_builtins()
            .load("csv", &[], &LoadOptions::default())
            .is_err());
    }
}
