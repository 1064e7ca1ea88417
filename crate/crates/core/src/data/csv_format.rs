use std::path::{Path, PathBuf};

use super::{load_all, DatasetFormat, LoadOptions};
use crate::error::{Error, Result};
use crate::types::Dataset;

/// Comma-separated decimals, one sample per line, optional header.
#[derive(Clone, Copy, Debug, Default)]
pub struct Csv;

impl DatasetFormat for Csv {
    fn name(&self) -> &'static str {
        "csv"
    }

    fn load(&self, paths: &[PathBuf], opts: &LoadOptions) -> Result<Dataset> {
        load_all(paths, |p| load_csv(p, opts.csv_header))
    }
}

pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    read_csv(file, has_header, path)
}

pub(crate) fn read_csv(
    reader: impl std::io::Read,
    has_header: bool,
    path: &Path,
) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            msg: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| Error::Parse {
                    path: path.into(),
                    line,
                    msg: format!("non-numeric field `{f}`"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    path: path.into(),
                    line,
                    msg: format!("ragged row: {} fields, expected {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    Dataset::from_rows(rows, path.display().to_string())
}
