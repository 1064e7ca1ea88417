//! Experimental protocol: random train/test splits, repeated trials and
//! convergence sweeps over the training-set size.

use rand::seq::{index, SliceRandom};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::empirical_measure;
use crate::rng::stream;
use crate::search::{adv_risk, search_halfspace, SearchConfig};
use crate::types::{mean_std, ConcentrationEstimate, Dataset, TrialReport};

/// Random partition into `round(fraction·m)` training rows and the rest.
/// Both parts keep the original row order.
pub fn split(data: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::domain(format!(
            "split fraction must lie in (0, 1), got {fraction}"
        )));
    }
    let m = data.m();
    if m < 2 {
        return Err(Error::InsufficientData(format!("cannot split {m} row(s)")));
    }
    let n_train = ((fraction * m as f64).round() as usize).clamp(1, m - 1);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut stream(seed, 0));
    let (train, test) = perm.split_at_mut(n_train);
    train.sort_unstable();
    test.sort_unstable();
    let src = data.source();
    Ok((
        data.select(train, format!("{src}[train seed={seed}]"))?,
        data.select(test, format!("{src}[test seed={seed}]"))?,
    ))
}

/// Searches on `train` and scores the result on both splits.
pub fn evaluate_split(
    train: &Dataset,
    test: &Dataset,
    cfg: &SearchConfig,
) -> Result<ConcentrationEstimate> {
    let found = search_halfspace(train, cfg)?;
    let h = &found.half_space;
    Ok(ConcentrationEstimate {
        test_risk: empirical_measure(test, h)?,
        test_adv_risk: adv_risk(test, h, cfg.problem())?,
        train_risk: found.train_risk,
        train_adv_risk: found.train_adv_risk,
        origin: found.origin,
        half_space: found.half_space,
    })
}

/// Trial `t` splits with seed `base_seed + t`.
pub fn run_trials(
    data: &Dataset,
    cfg: &SearchConfig,
    trials: usize,
    base_seed: u64,
    fraction: f64,
) -> Result<TrialReport> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    let estimates = (0..trials)
        .into_par_iter()
        .map(|t| {
            let (train, test) = split(data, fraction, base_seed.wrapping_add(t as u64))?;
            evaluate_split(&train, &test, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialReport::from_estimates(estimates))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub train_size: usize,
    pub mean_test_adv_risk: f64,
    pub std_test_adv_risk: f64,
    pub mean_test_risk: f64,
    pub trials: usize,
}

/// For each training size, draws disjoint train and test subsets without
/// replacement (fresh per trial), searches on train and scores on test.
/// Points come back in ascending `train_size`.
pub fn convergence_sweep(
    data: &Dataset,
    cfg: &SearchConfig,
    train_sizes: &[usize],
    test_size: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvergencePoint>> {
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if test_size == 0 {
        return Err(Error::domain("test size must be at least 1"));
    }
    let mut sizes = train_sizes.to_vec();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.is_empty() {
        return Err(Error::domain("no training sizes given"));
    }
    for &s in &sizes {
        if s < 2 {
            return Err(Error::domain(format!("training size {s} is below 2")));
        }
        if s + test_size > data.m() {
            return Err(Error::InsufficientData(format!(
                "train size {s} + test size {test_size} exceeds the {} available rows",
                data.m()
            )));
        }
    }

    sizes
        .iter()
        .map(|&size| {
            let runs = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = stream(seed, ((size as u64) << 20) | t as u64);
                    let picked = index::sample(&mut rng, data.m(), size + test_size).into_vec();
                    let (tr, te) = picked.split_at(size);
                    let train =
                        data.select(tr, format!("{}[train n={size} t={t}]", data.source()))?;
                    let test = data.select(te, format!("{}[test t={t}]", data.source()))?;
                    evaluate_split(&train, &test, cfg)
                })
                .collect::<Result<Vec<_>>>()?;
            let adv: Vec<f64> = runs.iter().map(|e| e.test_adv_risk).collect();
            let risk: Vec<f64> = runs.iter().map(|e| e.test_risk).collect();
            let (mean, std) = mean_std(&adv);
            Ok(ConvergencePoint {
                train_size: size,
                mean_test_adv_risk: mean,
                std_test_adv_risk: std,
                mean_test_risk: mean_std(&risk).0,
                trials,
            })
        })
        .collect()
}

/// Samples sufficient for half-space concentration to generalize within
/// `delta`: `⌈c₁·n·ln(n)/δ²⌉`. The constant `c₁` is not known in closed
/// form and is left to the caller.
pub fn required_sample_size(n: usize, delta: f64, c1: f64) -> Result<u64> {
    if n < 2 {
        return Err(Error::domain(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::domain(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !(c1 > 0.0 && c1.is_finite()) {
        return Err(Error::domain(format!("c1 must be positive, got {c1}")));
    }
    let nf = n as f64;
    Ok((c1 * nf * nf.ln() / (delta * delta)).ceil() as u64)
}
