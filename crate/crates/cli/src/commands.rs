use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use concentrate::analytic::{gii_lower_bound, optimal_halfspace, sqrt_matrix_p_norm, OptimalKind};
use concentrate::data::{encode_gauss_bin, sample_gaussian};
use concentrate::eval::{convergence_sweep, run_trials};
use concentrate::{Error, LpMetric};
use serde::Serialize;

use crate::args::{
    gaussian_spec, parse_cov, parse_epsilon, parse_metric, CovArg, DataArgs, Epsilon, ProblemArgs,
};
use crate::report::{self, DatasetInfo, EstimateReport, Summary, TrialEntry};
use crate::{CliError, VERSION};

#[derive(Args, Clone, Debug, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub problem: ProblemArgs,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    /// Fraction of the data used for training.
    #[arg(long, default_value_t = 0.5)]
    pub split: f64,

    /// Trial `t` splits with seed `seed + t`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Text report path; the JSON report goes next to it.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn estimate(a: &EstimateArgs) -> Result<(), CliError> {
    let cfg = a.problem.config()?;
    if !(a.split > 0.0 && a.split < 1.0) {
        return Err(CliError::Usage(format!(
            "--split must lie in (0, 1), got {}",
            a.split
        )));
    }
    let data = a.data.load()?;
    let report =
        run_trials(&data, &cfg, a.trials as usize, a.seed, a.split).map_err(CliError::Data)?;

    let trials = report
        .estimates
        .iter()
        .enumerate()
        .map(|(t, e)| TrialEntry::new(t, a.seed.wrapping_add(t as u64), e))
        .collect();
    let out = EstimateReport {
        tool: "concentrate",
        version: VERSION,
        command: "estimate",
        flags: a,
        dataset: DatasetInfo {
            source: data.source().to_string(),
            m: data.m(),
            n: data.n(),
        },
        trials,
        summary: Summary::of(&report),
    };
    let (text_path, json_path) = report::output_paths(&a.out);
    report::write(&text_path, out.to_text())?;
    report::write(&json_path, out.to_json())?;
    println!(
        "test risk {:.2} ± {:.2} %, test adv risk {:.2} ± {:.2} %",
        100.0 * report.mean_test_risk,
        100.0 * report.std_test_risk,
        100.0 * report.mean_test_adv_risk,
        100.0 * report.std_test_adv_risk
    );
    Ok(())
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub problem: ProblemArgs,

    /// Training-set sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,

    #[arg(long, default_value_t = 30_000)]
    pub test_size: usize,

    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Known generating Gaussian; adds an `analytic` column.
    #[arg(long, value_parser = parse_cov)]
    pub cov: Option<CovArg>,

    /// Mean of the generating Gaussian: `zero` or a file of numbers.
    #[arg(long, default_value = "zero")]
    pub mean: String,

    /// CSV output path.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn converge(a: &ConvergeArgs) -> Result<(), CliError> {
    let cfg = a.problem.config()?;
    let data = a.data.load()?;
    let analytic = match &a.cov {
        Some(cov) => {
            let spec = gaussian_spec(cov, &a.mean, Some(data.n()))?;
            Some(analytic_bound(
                &spec,
                a.problem.alpha,
                a.problem.eps.value,
                a.problem.metric,
            )?)
        }
        None => None,
    };
    let points = convergence_sweep(
        &data,
        &cfg,
        &a.sizes,
        a.test_size,
        a.trials as usize,
        a.seed,
    )
    .map_err(|e| match e {
        Error::Domain(msg) => CliError::Usage(msg),
        other => CliError::Data(other),
    })?;

    let mut csv = String::from("train_size,mean_adv_risk,std_adv_risk,trials");
    if analytic.is_some() {
        csv.push_str(",analytic");
    }
    csv.push('\n');
    for p in &points {
        let _ = write!(
            csv,
            "{},{},{},{}",
            p.train_size, p.mean_test_adv_risk, p.std_test_adv_risk, p.trials
        );
        if let Some(v) = analytic {
            let _ = write!(csv, ",{v}");
        }
        csv.push('\n');
    }
    report::write(&a.out, csv)?;
    for p in &points {
        println!(
            "train_size={} test_adv_risk={:.4} ± {:.4}",
            p.train_size, p.mean_test_adv_risk, p.std_test_adv_risk
        );
    }
    Ok(())
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct SynthArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,

    /// Number of samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    #[arg(long, value_parser = parse_cov)]
    pub cov: CovArg,

    #[arg(long, default_value = "zero")]
    pub mean: String,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long)]
    pub out: PathBuf,
}

pub fn synth(a: &SynthArgs) -> Result<(), CliError> {
    let spec = gaussian_spec(&a.cov, &a.mean, Some(a.dim as usize))?;
    let data =
        sample_gaussian(&spec, a.n as usize, a.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let bytes = encode_gauss_bin(&data).map_err(CliError::Data)?;
    report::write(&a.out, bytes)?;
    println!(
        "wrote {}×{} samples to {}",
        data.m(),
        data.n(),
        a.out.display()
    );
    Ok(())
}

#[derive(Args, Clone, Debug, Serialize)]
pub struct AnalyticArgs {
    #[arg(long)]
    pub alpha: f64,

    #[arg(long, value_parser = parse_epsilon)]
    pub eps: Epsilon,

    #[arg(long, value_parser = parse_metric)]
    pub metric: LpMetric,

    #[arg(long, value_parser = parse_cov)]
    pub cov: CovArg,

    #[arg(long, default_value = "zero")]
    pub mean: String,

    /// Dimension for a spherical covariance with zero mean.
    #[arg(long)]
    pub dim: Option<usize>,
}

fn analytic_bound(
    spec: &concentrate::analytic::GaussianSpec,
    alpha: f64,
    eps: f64,
    metric: LpMetric,
) -> Result<f64, CliError> {
    gii_lower_bound(spec, alpha, eps, metric).map_err(|e| match e {
        Error::Unsupported(msg) => CliError::Unsupported(msg),
        other => CliError::Usage(other.to_string()),
    })
}

pub fn analytic(a: &AnalyticArgs) -> Result<(), CliError> {
    let spec = gaussian_spec(&a.cov, &a.mean, a.dim)?;
    let bound = analytic_bound(&spec, a.alpha, a.eps.value, a.metric)?;
    let norm =
        sqrt_matrix_p_norm(&spec, a.metric).map_err(|e| CliError::Unsupported(e.to_string()))?;
    let mut line = format!("lower_bound={bound} sqrt_cov_norm={norm}");
    match optimal_halfspace(&spec, a.alpha, a.metric) {
        Ok((h, OptimalKind::Axis)) => {
            let j = h.w().iter().position(|&v| v == 1.0).unwrap_or(0);
            let _ = write!(line, " optimal=axis w=e{j} b={}", h.b());
        }
        Ok((h, OptimalKind::TopEigenvector)) => {
            let w: Vec<String> = h.w().iter().map(|v| v.to_string()).collect();
            let _ = write!(
                line,
                " optimal=top-eigenvector w={} b={}",
                w.join(","),
                h.b()
            );
        }
        Err(Error::Unsupported(_)) => line.push_str(" optimal=unknown"),
        Err(e) => return Err(CliError::Usage(e.to_string())),
    }
    println!("{line}");
    Ok(())
}
