//! Heuristic search for a half space with a slowly growing ε-expansion.
//!
//! Candidate normals are the principal components of the training data,
//! each bent toward its dominant coordinate axis by the power transform for
//! every exponent in the schedule, in both orientations. For a candidate
//! `w` the bias is placed at the α-quantile of the projections so the
//! measure constraint holds by construction, and the candidate is scored by
//! the empirical measure of its ε-expansion. The minimum over candidates is
//! an upper bound on the empirical concentration over half spaces.
//!
//! Scoring uses batched projections `W·Xᵀ`; the winner is then re-derived
//! through [`quantile_bias`] and [`adv_risk`], so every reported number
//! comes from the canonical per-row inner product.

use std::cmp::Ordering;

use ndarray::linalg::general_mat_mul;
use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{empirical_measure, expand};
use crate::spectral::{
    axis_limit, eigendecompose_with, pow_transform, sample_covariance, SolverRegistry,
    DEFAULT_SOLVER,
};
use crate::types::{dot, CandidateOrigin, ConcentrationProblem, Dataset, HalfSpace};

/// Candidates scored per batched projection.
const CANDIDATE_BLOCK: usize = 256;

pub const DEFAULT_EXPONENTS: [u32; 7] = [1, 2, 4, 8, 16, 32, 64];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    exponent_schedule: Vec<u32>,
    include_axis_limit: bool,
    problem: ConcentrationProblem,
    eigen_solver: String,
}

impl SearchConfig {
    pub fn new(
        problem: ConcentrationProblem,
        exponent_schedule: Vec<u32>,
        include_axis_limit: bool,
    ) -> Result<Self> {
        if exponent_schedule.is_empty() {
            return Err(Error::domain("exponent schedule must be nonempty"));
        }
        if !exponent_schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::domain(
                "exponent schedule must be strictly increasing",
            ));
        }
        if exponent_schedule[0] != 1 {
            return Err(Error::domain("exponent schedule must start at 1"));
        }
        Ok(Self {
            exponent_schedule,
            include_axis_limit,
            problem,
            eigen_solver: DEFAULT_SOLVER.to_string(),
        })
    }

    /// Doubling schedule `1, 2, …, 64` plus the axis limit.
    pub fn with_defaults(problem: ConcentrationProblem) -> Self {
        Self::new(problem, DEFAULT_EXPONENTS.to_vec(), true).expect("valid default schedule")
    }

    pub fn with_eigen_solver(mut self, name: impl Into<String>) -> Self {
        self.eigen_solver = name.into();
        self
    }

    pub fn problem(&self) -> &ConcentrationProblem {
        &self.problem
    }

    pub fn exponent_schedule(&self) -> &[u32] {
        &self.exponent_schedule
    }

    pub fn include_axis_limit(&self) -> bool {
        self.include_axis_limit
    }

    pub fn eigen_solver(&self) -> &str {
        &self.eigen_solver
    }
}

/// Smallest `k ∈ [1, m]` with `k/m ≥ α` as evaluated in floating point.
pub fn order_statistic_rank(alpha: f64, m: usize) -> usize {
    let mf = m as f64;
    let mut k = ((alpha * mf).ceil() as usize).clamp(1, m);
    while k > 1 && (k - 1) as f64 / mf >= alpha {
        k -= 1;
    }
    while k < m && (k as f64 / mf) < alpha {
        k += 1;
    }
    k
}

/// Bias `b = −t` with `t` the `⌈αm⌉`-th smallest projection `wᵀxᵢ`, so
/// that at least that many rows satisfy `wᵀx + b ≤ 0`.
pub fn quantile_bias(data: &Dataset, w: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if w.len() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            found: w.len(),
        });
    }
    let mut proj: Vec<f64> = data.rows().map(|x| dot(w, x)).collect();
    let k = order_statistic_rank(alpha, data.m());
    let (_, t, _) = proj.select_nth_unstable_by(k - 1, f64::total_cmp);
    Ok(-*t)
}

/// Empirical measure of the ε-expansion of `h`.
pub fn adv_risk(data: &Dataset, h: &HalfSpace, problem: &ConcentrationProblem) -> Result<f64> {
    empirical_measure(data, &expand(h, problem.epsilon(), problem.metric()))
}

/// Best half space found on the training data.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub half_space: HalfSpace,
    pub origin: CandidateOrigin,
    pub train_risk: f64,
    pub train_adv_risk: f64,
    pub candidates_evaluated: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Family {
    Power(u32),
    Axis,
}

impl Family {
    fn exponent(self) -> Option<u32> {
        match self {
            Family::Power(s) => Some(s),
            Family::Axis => None,
        }
    }

    fn direction(self, v: &[f64]) -> Result<Vec<f64>> {
        match self {
            Family::Power(s) => pow_transform(v, s),
            Family::Axis => axis_limit(v),
        }
    }
}

/// Score of one candidate. Ordered by expanded count, then dual norm,
/// component index, family rank (exponent ascending, axis last) and
/// orientation (positive first).
#[derive(Clone, Copy, Debug)]
struct Scored {
    count: usize,
    dual_norm: f64,
    component: usize,
    family: usize,
    negated: bool,
}

impl Scored {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then(self.dual_norm.total_cmp(&other.dual_norm))
            .then(self.component.cmp(&other.component))
            .then(self.family.cmp(&other.family))
            .then(self.negated.cmp(&other.negated))
    }

    fn min(a: Self, b: Self) -> Self {
        if b.cmp_key(&a) == Ordering::Less {
            b
        } else {
            a
        }
    }
}

/// Scores both orientations of a candidate from its projections.
fn score_pair(proj: &[f64], k: usize, shift: f64, scratch: &mut Vec<f64>) -> (usize, usize) {
    let m = proj.len();
    scratch.clear();
    scratch.extend_from_slice(proj);
    let t = *scratch.select_nth_unstable_by(k - 1, f64::total_cmp).1;
    let u = *scratch.select_nth_unstable_by(m - k, f64::total_cmp).1;
    // +w: b = −t; −w: projections −p, k-th smallest is −u, so b = u
    let (bp, bm) = if shift == 0.0 {
        (-t, u)
    } else {
        (-t - shift, u - shift)
    };
    let plus = proj.iter().filter(|&&v| v + bp <= 0.0).count();
    let minus = proj.iter().filter(|&&v| -v + bm <= 0.0).count();
    (plus, minus)
}

/// Runs the search with the built-in eigen solvers.
pub fn search_halfspace(train: &Dataset, cfg: &SearchConfig) -> Result<SearchOutcome> {
    search_halfspace_with(train, cfg, &SolverRegistry::with_builtins())
}

pub fn search_halfspace_with(
    train: &Dataset,
    cfg: &SearchConfig,
    solvers: &SolverRegistry,
) -> Result<SearchOutcome> {
    let (m, n) = (train.m(), train.n());
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "search needs at least 2 training samples, got {m}"
        )));
    }
    let problem = cfg.problem;
    let metric = problem.metric();
    let epsilon = problem.epsilon();
    let k = order_statistic_rank(problem.alpha(), m);

    let solver = solvers.get(&cfg.eigen_solver)?;
    let pcs = eigendecompose_with(&sample_covariance(train)?, solver.as_ref())?;

    let mut families: Vec<Family> = cfg
        .exponent_schedule
        .iter()
        .map(|&s| Family::Power(s))
        .collect();
    if cfg.include_axis_limit {
        families.push(Family::Axis);
    }

    let x = train.samples();
    let mut best: Option<Scored> = None;
    let mut evaluated = 0;
    for (rank, &family) in families.iter().enumerate() {
        for start in (0..pcs.len()).step_by(CANDIDATE_BLOCK) {
            let end = (start + CANDIDATE_BLOCK).min(pcs.len());
            let dirs: Vec<Vec<f64>> = (start..end)
                .map(|i| family.direction(pcs.vector(i)))
                .collect::<Result<_>>()?;

            let proj = match family {
                Family::Axis => axis_projections(train, &dirs),
                Family::Power(_) => {
                    let flat: Vec<f64> = dirs.iter().flatten().copied().collect();
                    let w = Array2::from_shape_vec((dirs.len(), n), flat).expect("block shape");
                    let mut p = Array2::<f64>::zeros((dirs.len(), m));
                    general_mat_mul(1.0, &w, &x.t(), 0.0, &mut p);
                    p
                }
            };

            let block_best = proj
                .as_slice()
                .expect("standard layout")
                .par_chunks(m)
                .zip(dirs.par_iter())
                .enumerate()
                .map_init(
                    || Vec::with_capacity(m),
                    |scratch, (offset, (p, w))| {
                        let dual_norm = metric.dual_norm(w);
                        let (plus, minus) = score_pair(p, k, epsilon * dual_norm, scratch);
                        let base = Scored {
                            count: plus,
                            dual_norm,
                            component: start + offset,
                            family: rank,
                            negated: false,
                        };
                        Scored::min(
                            base,
                            Scored {
                                count: minus,
                                negated: true,
                                ..base
                            },
                        )
                    },
                )
                .reduce_with(Scored::min);
            evaluated += 2 * dirs.len();
            if let Some(b) = block_best {
                best = Some(best.map_or(b, |a| Scored::min(a, b)));
            }
        }
    }

    let win = best.ok_or_else(|| Error::InsufficientData("no candidates were evaluated".into()))?;
    let family = families[win.family];
    let mut w = family.direction(pcs.vector(win.component))?;
    if win.negated {
        w.iter_mut().for_each(|v| *v = -*v);
    }
    let b = quantile_bias(train, &w, problem.alpha())?;
    let half_space = HalfSpace::new(w, b)?;
    let train_risk = empirical_measure(train, &half_space)?;
    let train_adv_risk = adv_risk(train, &half_space, &problem)?;
    debug_assert!(train_risk >= problem.alpha());

    Ok(SearchOutcome {
        half_space,
        origin: CandidateOrigin {
            component: win.component,
            exponent: family.exponent(),
            negated: win.negated,
        },
        train_risk,
        train_adv_risk,
        candidates_evaluated: evaluated,
    })
}

/// Projections onto signed coordinate axes are just signed columns.
fn axis_projections(data: &Dataset, dirs: &[Vec<f64>]) -> Array2<f64> {
    let m = data.m();
    let mut p = Array2::<f64>::zeros((dirs.len(), m));
    for (mut row, w) in p.rows_mut().into_iter().zip(dirs) {
        let (j, sign) = w
            .iter()
            .enumerate()
            .find(|(_, v)| **v != 0.0)
            .map(|(j, v)| (j, *v))
            .expect("axis vector has one nonzero entry");
        for (dst, x) in row.iter_mut().zip(data.rows()) {
            *dst = sign * x[j];
        }
    }
    p
}
