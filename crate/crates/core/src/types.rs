//! Domain types shared across the crate.

use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::LpMetric;

/// Canonical inner product. Every membership decision goes through this
/// function so that bias selection and measure counting agree bit for bit.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// An `m × n` sample matrix, one instance per row.
#[derive(Clone, Debug)]
pub struct Dataset {
    samples: Array2<f64>,
    source: String,
}

impl Dataset {
    pub fn new(samples: Array2<f64>, source: impl Into<String>) -> Result<Self> {
        let (m, n) = samples.dim();
        if m == 0 || n == 0 {
            return Err(Error::InvalidData(format!("empty dataset ({m}×{n})")));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite entry at row {}, column {}",
                pos / n,
                pos % n
            )));
        }
        let samples = if samples.is_standard_layout() {
            samples
        } else {
            samples.as_standard_layout().into_owned()
        };
        Ok(Self {
            samples,
            source: source.into(),
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>, source: impl Into<String>) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidData(format!(
                "row {i} has {} columns, expected {n}",
                r.len()
            )));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let samples =
            Array2::from_shape_vec((m, n), flat).map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(samples, source)
    }

    /// Number of samples.
    pub fn m(&self) -> usize {
        self.samples.nrows()
    }

    /// Dimension.
    pub fn n(&self) -> usize {
        self.samples.ncols()
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn samples(&self) -> &Array2<f64> {
        &self.samples
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.as_slice()[i * n..(i + 1) * n]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.as_slice().chunks_exact(self.n())
    }

    pub fn as_slice(&self) -> &[f64] {
        self.samples
            .as_slice()
            .expect("dataset is stored in standard layout")
    }

    /// Copies the listed rows, in order, into a new dataset.
    pub fn select(&self, indices: &[usize], source: impl Into<String>) -> Result<Self> {
        let n = self.n();
        let mut flat = Vec::with_capacity(indices.len() * n);
        for &i in indices {
            if i >= self.m() {
                return Err(Error::InvalidData(format!("row index {i} out of range")));
            }
            flat.extend_from_slice(self.row(i));
        }
        let samples = Array2::from_shape_vec((indices.len(), n), flat)
            .map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(samples, source)
    }

    /// Stacks datasets of equal dimension.
    pub fn concat(parts: Vec<Dataset>, source: impl Into<String>) -> Result<Self> {
        let n = parts
            .first()
            .map(Dataset::n)
            .ok_or_else(|| Error::InvalidData("no datasets to concatenate".into()))?;
        let mut flat = Vec::new();
        let mut m = 0;
        for p in &parts {
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            flat.extend_from_slice(p.as_slice());
            m += p.m();
        }
        let samples =
            Array2::from_shape_vec((m, n), flat).map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(samples, source)
    }
}

/// Tolerance on `‖w‖₂ = 1` that constructed half spaces satisfy.
pub const UNIT_NORM_TOL: f64 = 1e-9;
/// Within this distance of unit norm the constructor renormalizes instead of rejecting.
pub const RENORMALIZE_TOL: f64 = 1e-6;

/// `H = { x : wᵀx + b ≤ 0 }` with `‖w‖₂ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfSpace {
    w: Vec<f64>,
    b: f64,
}

impl HalfSpace {
    /// Builds a half space from a (near) unit normal. Normals within
    /// [`RENORMALIZE_TOL`] of unit length are rescaled along with `b`, so
    /// the represented set is unchanged; anything further off is rejected.
    pub fn new(w: Vec<f64>, b: f64) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::domain("half space normal must be nonempty"));
        }
        if !b.is_finite() || w.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("half space parameters must be finite"));
        }
        let norm = l2_norm(&w);
        let dev = (norm - 1.0).abs();
        if dev <= UNIT_NORM_TOL {
            Ok(Self { w, b })
        } else if dev <= RENORMALIZE_TOL {
            Ok(Self {
                w: w.iter().map(|v| v / norm).collect(),
                b: b / norm,
            })
        } else {
            Err(Error::domain(format!(
                "half space normal has ‖w‖₂ = {norm}, expected 1"
            )))
        }
    }

    /// Normalizes an arbitrary nonzero normal, scaling `b` so that
    /// `{wᵀx + b ≤ 0}` is the same set.
    pub fn from_normal(w: Vec<f64>, b: f64) -> Result<Self> {
        let norm = l2_norm(&w);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain(
                "half space normal must be nonzero and finite",
            ));
        }
        Self::new(w.iter().map(|v| v / norm).collect(), b / norm)
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// `wᵀx + b`.
    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        dot(&self.w, x) + self.b
    }

    #[inline]
    pub fn contains(&self, x: &[f64]) -> bool {
        self.value(x) <= 0.0
    }

    pub(crate) fn with_bias(&self, b: f64) -> Self {
        Self {
            w: self.w.clone(),
            b,
        }
    }
}

pub(crate) fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Risk threshold α, perturbation budget ε and metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcentrationProblem {
    alpha: f64,
    epsilon: f64,
    metric: LpMetric,
}

impl ConcentrationProblem {
    pub fn new(alpha: f64, epsilon: f64, metric: LpMetric) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if !epsilon.is_finite() || epsilon < 0.0 {
            return Err(Error::domain(format!(
                "epsilon must be finite and nonnegative, got {epsilon}"
            )));
        }
        Ok(Self {
            alpha,
            epsilon,
            metric,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn metric(&self) -> LpMetric {
        self.metric
    }
}

/// Which candidate of the search produced a half space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateOrigin {
    /// Principal component index, in descending eigenvalue order.
    pub component: usize,
    /// Power exponent, or `None` for the axis-limit candidate.
    pub exponent: Option<u32>,
    pub negated: bool,
}

/// Risk and adversarial risk of one half space on a train/test split.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationEstimate {
    pub half_space: HalfSpace,
    pub origin: CandidateOrigin,
    pub train_risk: f64,
    pub train_adv_risk: f64,
    pub test_risk: f64,
    pub test_adv_risk: f64,
}

/// Per-trial estimates and their summary statistics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub estimates: Vec<ConcentrationEstimate>,
    pub mean_test_risk: f64,
    pub std_test_risk: f64,
    pub mean_test_adv_risk: f64,
    pub std_test_adv_risk: f64,
}

impl TrialReport {
    pub fn from_estimates(estimates: Vec<ConcentrationEstimate>) -> Self {
        let risk: Vec<f64> = estimates.iter().map(|e| e.test_risk).collect();
        let adv: Vec<f64> = estimates.iter().map(|e| e.test_adv_risk).collect();
        let (mean_test_risk, std_test_risk) = mean_std(&risk);
        let (mean_test_adv_risk, std_test_adv_risk) = mean_std(&adv);
        Self {
            estimates,
            mean_test_risk,
            std_test_risk,
            mean_test_adv_risk,
            std_test_adv_risk,
        }
    }
}

/// Arithmetic mean and population standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}
