//! Flag types shared by the subcommands.

use std::path::{Path, PathBuf};

use clap::Args;
use concentrate::analytic::{Covariance, GaussianSpec};
use concentrate::data::{FormatRegistry, LoadOptions};
use concentrate::search::{SearchConfig, DEFAULT_EXPONENTS};
use concentrate::spectral::{SolverRegistry, DEFAULT_SOLVER};
use concentrate::{ConcentrationProblem, Dataset, LpMetric};
use ndarray::Array2;
use serde::Serialize;

use crate::CliError;

/// A perturbation budget given either as a decimal or as an integer
/// fraction such as `8/255`.
#[derive(Clone, Debug, Serialize)]
pub struct Epsilon {
    pub text: String,
    pub value: f64,
}

pub fn parse_epsilon(s: &str) -> Result<Epsilon, String> {
    let s = s.trim();
    let value = if let Some((n, d)) = s.split_once('/') {
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let d: u64 = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if d == 0 {
            return Err("zero denominator".into());
        }
        if n >= 1 << 53 || d >= 1 << 53 {
            return Err("fraction terms must be below 2^53".into());
        }
        // both terms are exact in binary, so this is the correctly rounded quotient
        n as f64 / d as f64
    } else {
        s.parse::<f64>()
            .map_err(|_| format!("cannot parse epsilon `{s}`"))?
    };
    if !(value >= 0.0 && value.is_finite()) {
        return Err(format!("epsilon must be finite and nonnegative, got `{s}`"));
    }
    Ok(Epsilon {
        text: s.to_string(),
        value,
    })
}

pub fn parse_metric(s: &str) -> Result<LpMetric, String> {
    s.parse().map_err(|e: concentrate::Error| e.to_string())
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct DataArgs {
    /// Input file(s); several files of the same format are stacked.
    #[arg(long = "data", required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,

    /// One of: idx, cifar, csv, gauss-bin.
    #[arg(long, default_value = "gauss-bin")]
    pub format: String,

    /// Skip the first line of CSV input.
    #[arg(long)]
    pub csv_header: bool,
}

impl DataArgs {
    pub fn load(&self) -> Result<Dataset, CliError> {
        let registry = FormatRegistry::with_builtins();
        let format = registry
            .get(&self.format)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let opts = LoadOptions {
            csv_header: self.csv_header,
        };
        format.load(&self.data, &opts).map_err(CliError::Data)
    }
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ProblemArgs {
    /// Perturbation metric: l1, l2, l4, linf, or l<p> for rational p ≥ 1.
    #[arg(long, value_parser = parse_metric)]
    pub metric: LpMetric,

    /// Risk threshold in (0, 1).
    #[arg(long)]
    pub alpha: f64,

    /// Perturbation budget, e.g. `0.3` or `8/255`.
    #[arg(long, value_parser = parse_epsilon)]
    pub eps: Epsilon,

    /// Power exponents tried for each principal component.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_EXPONENTS.to_vec())]
    pub exponents: Vec<u32>,

    /// Skip the axis-limit candidate.
    #[arg(long)]
    pub no_axis_limit: bool,

    /// Eigen solver: householder-qr or jacobi.
    #[arg(long, default_value = DEFAULT_SOLVER)]
    pub eigen: String,
}

impl ProblemArgs {
    pub fn config(&self) -> Result<SearchConfig, CliError> {
        let usage = |e: concentrate::Error| CliError::Usage(e.to_string());
        let problem =
            ConcentrationProblem::new(self.alpha, self.eps.value, self.metric).map_err(usage)?;
        SolverRegistry::with_builtins()
            .get(&self.eigen)
            .map_err(usage)?;
        Ok(
            SearchConfig::new(problem, self.exponents.clone(), !self.no_axis_limit)
                .map_err(usage)?
                .with_eigen_solver(&self.eigen),
        )
    }
}

/// `spherical:<σ²>`, `diag:<path or comma list>` or `full:<path>`.
#[derive(Clone, Debug, Serialize)]
pub struct CovArg(pub String);

impl CovArg {
    pub fn kind(&self) -> &str {
        self.0.split_once(':').map_or("", |(k, _)| k)
    }
}

pub fn parse_cov(s: &str) -> Result<CovArg, String> {
    match s.split_once(':') {
        Some(("spherical" | "diag" | "full", rest)) if !rest.is_empty() => {
            Ok(CovArg(s.to_string()))
        }
        _ => Err(format!(
            "covariance must be spherical:<σ²>, diag:<path or csv> or full:<path>, got `{s}`"
        )),
    }
}

/// Reads numbers separated by commas, whitespace or newlines.
fn read_numbers(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    parse_numbers(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn parse_numbers(text: &str) -> Result<Vec<f64>, String> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| format!("non-numeric value `{t}`"))
        })
        .collect()
}

/// Builds a Gaussian from `--cov` and `--mean`. `dim` fixes the dimension
/// when neither flag implies one.
pub fn gaussian_spec(
    cov: &CovArg,
    mean: &str,
    dim: Option<usize>,
) -> Result<GaussianSpec, CliError> {
    let usage = |e: concentrate::Error| CliError::Usage(e.to_string());
    let (kind, rest) = cov.0.split_once(':').expect("validated by parse_cov");
    let covariance = match kind {
        "spherical" => Covariance::Spherical(
            rest.parse()
                .map_err(|_| CliError::Usage(format!("bad spherical variance `{rest}`")))?,
        ),
        "diag" => {
            let inline = parse_numbers(rest);
            let values = match inline {
                Ok(v) if !v.is_empty() => v,
                _ => read_numbers(Path::new(rest))?,
            };
            Covariance::Diagonal(values)
        }
        "full" => {
            let path = Path::new(rest);
            let values = read_numbers(path)?;
            let n = (values.len() as f64).sqrt().round() as usize;
            if n == 0 || n * n != values.len() {
                return Err(CliError::Usage(format!(
                    "{}: {} values do not form a square matrix",
                    path.display(),
                    values.len()
                )));
            }
            Covariance::full(Array2::from_shape_vec((n, n), values).expect("square"))
                .map_err(usage)?
        }
        _ => unreachable!("validated by parse_cov"),
    };

    let implied = match &covariance {
        Covariance::Spherical(_) => None,
        Covariance::Diagonal(d) => Some(d.len()),
        Covariance::Full { matrix, .. } => Some(matrix.nrows()),
    };
    let theta = if mean == "zero" {
        let n = dim.or(implied).unwrap_or(1);
        vec![0.0; n]
    } else {
        read_numbers(Path::new(mean))?
    };
    if let Some(d) = dim {
        if d != theta.len() {
            return Err(CliError::Usage(format!(
                "--dim {d} does not match the {}-dimensional mean",
                theta.len()
            )));
        }
    }
    GaussianSpec::new(theta, covariance).map_err(usage)
}
