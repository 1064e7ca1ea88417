//! ℓp geometry of half spaces.
//!
//! The ℓp distance from `x` to `H = {wᵀz + b ≤ 0}` is `(wᵀx + b)⁺ / ‖w‖_q`
//! by Hölder's inequality, so the ε-expansion of a half space is again a
//! half space, with bias shifted by `ε‖w‖_q`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lp::{Exponent, LpMetric};
use crate::types::{Dataset, HalfSpace};

/// Rows per parallel chunk when counting members.
const COUNT_CHUNK: usize = 4096;

/// Upper bound on rows accepted by [`brute_force_expansion_measure`].
pub const BRUTE_FORCE_MAX_ROWS: usize = 2000;

/// ℓp distance from `x` to `h`.
pub fn distance_to_halfspace(x: &[f64], h: &HalfSpace, metric: LpMetric) -> f64 {
    let v = h.value(x);
    if v <= 0.0 {
        0.0
    } else {
        v / metric.dual_norm(h.w())
    }
}

/// The point of `h` closest to an outside point `x` in ℓp.
///
/// The step is the Hölder equality case: with `d` the distance,
/// `ẑⱼ = xⱼ − d·sgn(wⱼ)·(|wⱼ|^q / Σ|wₖ|^q)^{1/p}` for finite `p > 1`,
/// `ẑ = x − d·sgn(w)` for `p = ∞`, and a single move along the largest
/// `|wⱼ|` (smallest index on ties) for `p = 1`.
pub fn nearest_point(x: &[f64], h: &HalfSpace, metric: LpMetric) -> Result<Vec<f64>> {
    if x.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: x.len(),
        });
    }
    let v = h.value(x);
    if v <= 0.0 {
        return Err(Error::Precondition(
            "nearest_point needs a point outside the half space".into(),
        ));
    }
    let w = h.w();
    let d = v / metric.dual_norm(w);
    let mut z = x.to_vec();
    match (metric.p(), metric.q()) {
        (Exponent::Infinity, _) => {
            for (zj, wj) in z.iter_mut().zip(w) {
                *zj -= d * sgn(*wj);
            }
        }
        (p, _) if p.is_one() => {
            let j = argmax_abs(w);
            z[j] -= d * sgn(w[j]);
        }
        (p, q) => {
            let p = p.as_f64().expect("finite p");
            let q = q.as_f64().expect("finite q for p > 1");
            // |w_j|^q / Σ|w_k|^q, scaled by the peak for range safety
            let peak = w.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            let weights: Vec<f64> = w.iter().map(|v| (v.abs() / peak).powf(q)).collect();
            let total: f64 = weights.iter().sum();
            for ((zj, wj), r) in z.iter_mut().zip(w).zip(&weights) {
                *zj -= d * sgn(*wj) * (r / total).powf(1.0 / p);
            }
        }
    }
    Ok(z)
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = j;
        }
    }
    best
}

/// ε-expansion `H_{w, b − ε‖w‖_q}`.
pub fn expand(h: &HalfSpace, epsilon: f64, metric: LpMetric) -> HalfSpace {
    if epsilon == 0.0 {
        return h.clone();
    }
    h.with_bias(h.b() - epsilon * metric.dual_norm(h.w()))
}

fn check_dim(data: &Dataset, h: &HalfSpace) -> Result<()> {
    if data.n() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: data.n(),
        });
    }
    Ok(())
}

/// Number of rows in `h`.
pub fn member_count(data: &Dataset, h: &HalfSpace) -> Result<usize> {
    check_dim(data, h)?;
    let n = data.n();
    Ok(data
        .as_slice()
        .par_chunks(COUNT_CHUNK * n)
        .map(|chunk| chunk.chunks_exact(n).filter(|x| h.contains(x)).count())
        .sum())
}

/// Fraction of rows in `h`. Boundary points are members.
pub fn empirical_measure(data: &Dataset, h: &HalfSpace) -> Result<f64> {
    Ok(member_count(data, h)? as f64 / data.m() as f64)
}

/// Indices of the rows in `h`.
pub fn members(data: &Dataset, h: &HalfSpace) -> Result<Vec<usize>> {
    check_dim(data, h)?;
    Ok(data
        .rows()
        .enumerate()
        .filter(|(_, x)| h.contains(x))
        .map(|(i, _)| i)
        .collect())
}

/// Fraction of rows within ℓp distance ε of some row in `member_set`,
/// by exhaustive pairwise search. Test oracle only.
pub fn brute_force_expansion_measure(
    data: &Dataset,
    member_set: &[usize],
    epsilon: f64,
    metric: LpMetric,
) -> Result<f64> {
    if data.m() > BRUTE_FORCE_MAX_ROWS {
        return Err(Error::InsufficientData(format!(
            "brute-force oracle is capped at {BRUTE_FORCE_MAX_ROWS} rows, got {}",
            data.m()
        )));
    }
    if let Some(&i) = member_set.iter().find(|&&i| i >= data.m()) {
        return Err(Error::InvalidData(format!("member index {i} out of range")));
    }
    let covered = data
        .rows()
        .filter(|x| {
            member_set
                .iter()
                .any(|&j| metric.distance(x, data.row(j)) <= epsilon)
        })
        .count();
    Ok(covered as f64 / data.m() as f64)
}
