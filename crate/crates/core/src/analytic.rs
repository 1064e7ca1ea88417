//! Exact Gaussian concentration.
//!
//! For `ν = N(θ, Σ)` and `p ≥ 2`, every set `E` satisfies
//!
//! ```text
//! ν(E_ε) ≥ Φ(Φ⁻¹(ν(E)) + ε / ‖Σ^{1/2}‖_p)
//! ```
//!
//! with equality for suitable half spaces when Σ is spherical (any `p ≥ 2`)
//! or when `p = 2` (any Σ). That makes the Gaussian case the one setting
//! where the empirical search has a known target.

use libm::erfc;
use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{Exponent, LpMetric};
use crate::spectral::{eigendecompose, PrincipalComponents};
use crate::types::HalfSpace;

/// Standard normal CDF Φ.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse of Φ: a rational initial guess refined by two Newton steps.
pub fn std_normal_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::domain(format!(
            "quantile level must lie in (0, 1), got {u}"
        )));
    }
    if u > 0.5 {
        // 1 − u is exact for u ∈ [0.5, 1]
        return Ok(-lower_quantile(1.0 - u));
    }
    Ok(lower_quantile(u))
}

/// Quantile for `u ∈ (0, 0.5]`, where Φ is evaluated without cancellation.
fn lower_quantile(u: f64) -> f64 {
    if u == 0.5 {
        return 0.0;
    }
    let mut x = acklam(u);
    for _ in 0..2 {
        let err = std_normal_cdf(x) - u;
        let pdf = std_normal_pdf(x);
        if pdf == 0.0 {
            break;
        }
        x -= err / pdf;
    }
    x
}

/// Acklam's rational approximation to Φ⁻¹ on the lower half, relative
/// error about 1.2e-9.
fn acklam(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383_577_518_672_69e2,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if u < P_LOW {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// Structured covariance of a Gaussian.
#[derive(Clone, Debug)]
pub enum Covariance {
    /// `σ² I`.
    Spherical(f64),
    /// `diag(d₁, …, dₙ)`.
    Diagonal(Vec<f64>),
    /// A dense SPD matrix, kept together with its eigendecomposition.
    Full {
        matrix: Array2<f64>,
        eigen: PrincipalComponents,
    },
}

impl Covariance {
    pub fn full(matrix: Array2<f64>) -> Result<Self> {
        let eigen = eigendecompose(&matrix)?;
        if eigen.eigenvalues().iter().any(|&l| l <= 0.0) {
            return Err(Error::domain("full covariance must be positive definite"));
        }
        Ok(Covariance::Full { matrix, eigen })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Covariance::Spherical(_) => "spherical",
            Covariance::Diagonal(_) => "diagonal",
            Covariance::Full { .. } => "full",
        }
    }
}

/// `N(θ, Σ)`.
#[derive(Clone, Debug)]
pub struct GaussianSpec {
    theta: Vec<f64>,
    covariance: Covariance,
}

impl GaussianSpec {
    pub fn new(theta: Vec<f64>, covariance: Covariance) -> Result<Self> {
        let n = theta.len();
        if n == 0 {
            return Err(Error::domain("Gaussian dimension must be at least 1"));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("mean must be finite"));
        }
        match &covariance {
            Covariance::Spherical(s2) => {
                if !(*s2 > 0.0 && s2.is_finite()) {
                    return Err(Error::domain(format!("σ² must be positive, got {s2}")));
                }
            }
            Covariance::Diagonal(d) => {
                if d.len() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: d.len(),
                    });
                }
                if d.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::domain("diagonal variances must be positive"));
                }
            }
            Covariance::Full { matrix, .. } => {
                if matrix.dim() != (n, n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        found: matrix.nrows(),
                    });
                }
            }
        }
        Ok(Self { theta, covariance })
    }

    /// `N(0, σ² Iₙ)`.
    pub fn spherical(n: usize, variance: f64) -> Result<Self> {
        Self::new(vec![0.0; n], Covariance::Spherical(variance))
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn covariance(&self) -> &Covariance {
        &self.covariance
    }

    /// Dense `Σ^{1/2}` (symmetric square root).
    pub fn sqrt_covariance(&self) -> Array2<f64> {
        let n = self.dim();
        match &self.covariance {
            Covariance::Spherical(s2) => Array2::eye(n) * s2.sqrt(),
            Covariance::Diagonal(d) => Array2::from_diag(&ndarray::arr1(d).mapv(f64::sqrt)),
            Covariance::Full { eigen, .. } => {
                // U Λ^{1/2} Uᵀ with components stored as rows of U
                let u = eigen.vectors();
                let mut scaled = u.clone();
                for (mut row, &l) in scaled.rows_mut().into_iter().zip(eigen.eigenvalues()) {
                    row *= l.sqrt();
                }
                u.t().dot(&scaled)
            }
        }
    }
}

/// Induced matrix p-norm `‖Σ^{1/2}‖_p` for the structures where it has a
/// closed form.
pub fn sqrt_matrix_p_norm(spec: &GaussianSpec, metric: LpMetric) -> Result<f64> {
    match &spec.covariance {
        Covariance::Spherical(s2) => Ok(s2.sqrt()),
        // induced p-norm of a nonnegative diagonal matrix is its largest entry
        Covariance::Diagonal(d) => Ok(d.iter().fold(0.0, |m: f64, v| m.max(v.sqrt()))),
        Covariance::Full { eigen, .. } if metric.p() == Exponent::TWO => {
            Ok(eigen.eigenvalues()[0].sqrt())
        }
        Covariance::Full { .. } => Err(Error::Unsupported(format!(
            "induced {} norm of a full covariance square root: approximating general \
             matrix p-norms is NP-hard, only p = 2 is supported",
            metric
        ))),
    }
}

/// Lower bound on the measure of the ε-expansion of any set of measure
/// `measure_of_e`, tight for the half spaces of [`optimal_halfspace`].
pub fn gii_lower_bound(
    spec: &GaussianSpec,
    measure_of_e: f64,
    epsilon: f64,
    metric: LpMetric,
) -> Result<f64> {
    if !(measure_of_e > 0.0 && measure_of_e < 1.0) {
        return Err(Error::domain(format!(
            "set measure must lie in (0, 1), got {measure_of_e}"
        )));
    }
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::domain(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if metric.p() < Exponent::TWO {
        return Err(Error::domain(format!(
            "the Gaussian isoperimetric bound requires p ≥ 2, got {metric}"
        )));
    }
    let scale = sqrt_matrix_p_norm(spec, metric)?;
    if epsilon == 0.0 {
        return Ok(measure_of_e);
    }
    let bound = std_normal_cdf(std_normal_quantile(measure_of_e)? + epsilon / scale);
    Ok(bound.max(measure_of_e))
}

/// Where the optimal half space came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum OptimalKind {
    /// Spherical or diagonal covariance, `p ≥ 2`: the coordinate axis of
    /// largest variance (the first one for spherical).
    Axis,
    /// `p = 2`: the top eigenvector of Σ.
    TopEigenvector,
}

/// A half space of measure exactly `alpha` whose ε-expansion attains
/// [`gii_lower_bound`].
pub fn optimal_halfspace(
    spec: &GaussianSpec,
    alpha: f64,
    metric: LpMetric,
) -> Result<(HalfSpace, OptimalKind)> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let z = std_normal_quantile(alpha)?;
    let n = spec.dim();
    let p = metric.p();
    match &spec.covariance {
        cov @ (Covariance::Spherical(_) | Covariance::Diagonal(_)) if p >= Exponent::TWO => {
            let (w, var) = top_direction(cov, n);
            let j = w.iter().position(|&v| v == 1.0).unwrap_or(0);
            let b = -spec.theta[j] - var.sqrt() * z;
            Ok((HalfSpace::new(w, b)?, OptimalKind::Axis))
        }
        cov if p == Exponent::TWO => {
            let (v, lambda) = top_direction(cov, n);
            let proj: f64 = v.iter().zip(&spec.theta).map(|(a, b)| a * b).sum();
            let b = -proj - lambda.sqrt() * z;
            Ok((HalfSpace::new(v, b)?, OptimalKind::TopEigenvector))
        }
        cov => Err(Error::Unsupported(format!(
            "no known optimal half space for {} covariance under {}",
            cov.kind(),
            metric
        ))),
    }
}

fn top_direction(cov: &Covariance, n: usize) -> (Vec<f64>, f64) {
    match cov {
        Covariance::Spherical(s2) => {
            let mut v = vec![0.0; n];
            v[0] = 1.0;
            (v, *s2)
        }
        Covariance::Diagonal(d) => {
            let (j, &l) =
                d.iter().enumerate().fold(
                    (0, &d[0]),
                    |best, (j, l)| if *l > *best.1 { (j, l) } else { best },
                );
            let mut v = vec![0.0; n];
            v[j] = 1.0;
            (v, l)
        }
        Covariance::Full { eigen, .. } => (eigen.vector(0).to_vec(), eigen.eigenvalues()[0]),
    }
}
