//! Sample covariance, principal components and the power transform used
//! to bend a principal component toward its dominant axis.

mod jacobi;

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::linalg::general_mat_mul;
use ndarray::{s, Array1, Array2, Axis};

use crate::error::{Error, Result};
use crate::types::{l2_norm, Dataset};

pub use jacobi::Jacobi;

/// Rows per block when accumulating the covariance.
const COV_BLOCK: usize = 512;

/// Raw output of an eigen solver: `values[j]` pairs with column `j` of `vectors`.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Array2<f64>,
}

/// A symmetric eigen solver, selectable by name.
pub trait EigenSolver: Send + Sync {
    fn name(&self) -> &'static str;

    /// Eigenpairs of a symmetric matrix in any order.
    fn solve(&self, q: &Array2<f64>) -> Result<EigenPairs>;
}

/// Householder tridiagonalization followed by implicit symmetric QR,
/// backed by `nalgebra`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HouseholderQr;

impl EigenSolver for HouseholderQr {
    fn name(&self) -> &'static str {
        "householder-qr"
    }

    fn solve(&self, q: &Array2<f64>) -> Result<EigenPairs> {
        let n = q.nrows();
        let m = DMatrix::from_row_iterator(n, n, q.iter().copied());
        let eig = SymmetricEigen::try_new(m, f64::EPSILON, 0)
            .ok_or_else(|| Error::Numerical("symmetric QR did not converge".into()))?;
        let values = eig.eigenvalues.iter().copied().collect();
        let vectors = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, j)]);
        Ok(EigenPairs { values, vectors })
    }
}

/// Name → solver lookup.
#[derive(Clone)]
pub struct SolverRegistry {
    solvers: Vec<Arc<dyn EigenSolver>>,
}

pub const DEFAULT_SOLVER: &str = "householder-qr";

impl SolverRegistry {
    pub fn empty() -> Self {
        Self {
            solvers: Vec::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(HouseholderQr));
        r.register(Arc::new(Jacobi));
        r
    }

    /// Adds a solver, replacing any existing one with the same name.
    pub fn register(&mut self, solver: Arc<dyn EigenSolver>) {
        self.solvers.retain(|s| s.name() != solver.name());
        self.solvers.push(solver);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn EigenSolver>> {
        self.solvers
            .iter()
            .find(|s| s.name() == name)
            .cloned()
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "eigen solver",
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.solvers.iter().map(|s| s.name()).collect()
    }
}

impl Default for SolverRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

/// Unit eigenvectors of a covariance, ordered by eigenvalue descending.
#[derive(Clone, Debug)]
pub struct PrincipalComponents {
    /// Row `i` is the `i`-th component.
    vectors: Array2<f64>,
    eigenvalues: Vec<f64>,
}

impl PrincipalComponents {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        let n = self.dim();
        &self.vectors.as_slice().expect("standard layout")[i * n..(i + 1) * n]
    }

    pub fn vectors(&self) -> &Array2<f64> {
        &self.vectors
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Sorts, clamps tiny negative eigenvalues to zero, normalizes, and
    /// fixes each vector's sign so its first non-negligible coordinate is
    /// positive.
    fn from_pairs(pairs: EigenPairs, scale: f64) -> Result<Self> {
        let n = pairs.values.len();
        let floor = -1e-9 * scale.max(1.0);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| pairs.values[b].total_cmp(&pairs.values[a]));

        let mut vectors = Array2::zeros((n, n));
        let mut eigenvalues = Vec::with_capacity(n);
        for (row, &j) in order.iter().enumerate() {
            let lambda = pairs.values[j];
            if !lambda.is_finite() || lambda < floor {
                return Err(Error::Numerical(format!(
                    "eigenvalue {lambda:e} is below the clamp floor {floor:e}"
                )));
            }
            eigenvalues.push(lambda.max(0.0));

            let mut v: Vec<f64> = pairs.vectors.column(j).to_vec();
            let norm = l2_norm(&v);
            if norm == 0.0 || !norm.is_finite() {
                return Err(Error::Numerical("degenerate eigenvector".into()));
            }
            let flip = v.iter().find(|x| x.abs() > 1e-10).is_some_and(|x| *x < 0.0);
            let k = if flip { -1.0 / norm } else { 1.0 / norm };
            v.iter_mut().for_each(|x| *x *= k);
            vectors.row_mut(row).assign(&Array1::from(v));
        }
        Ok(Self {
            vectors,
            eigenvalues,
        })
    }
}

/// Unbiased sample covariance `(1/(m−1)) Σ (xᵢ − x̄)(xᵢ − x̄)ᵀ`.
pub fn sample_covariance(data: &Dataset) -> Result<Array2<f64>> {
    let (m, n) = (data.m(), data.n());
    if m < 2 {
        return Err(Error::InsufficientData(format!(
            "covariance needs at least 2 samples, got {m}"
        )));
    }
    let x = data.samples();
    let mean = x.sum_axis(Axis(0)) / m as f64;

    let mut q = Array2::<f64>::zeros((n, n));
    let mut start = 0;
    while start < m {
        let end = (start + COV_BLOCK).min(m);
        let block = &x.slice(s![start..end, ..]) - &mean;
        general_mat_mul(1.0, &block.t(), &block, 1.0, &mut q);
        start = end;
    }
    q /= (m - 1) as f64;
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (q[[i, j]] + q[[j, i]]);
            q[[i, j]] = avg;
            q[[j, i]] = avg;
        }
    }
    Ok(q)
}

fn max_abs(q: &Array2<f64>) -> f64 {
    q.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn check_symmetric(q: &Array2<f64>) -> Result<()> {
    let (r, c) = q.dim();
    if r != c {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: c,
        });
    }
    if r == 0 {
        return Err(Error::domain("empty matrix"));
    }
    let asym = (0..r)
        .flat_map(|i| (i + 1..r).map(move |j| (i, j)))
        .fold(0.0, |m: f64, (i, j)| m.max((q[[i, j]] - q[[j, i]]).abs()));
    if asym > 1e-9 * max_abs(q).max(1.0) || asym.is_nan() {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Principal components with the default solver.
pub fn eigendecompose(q: &Array2<f64>) -> Result<PrincipalComponents> {
    eigendecompose_with(q, &HouseholderQr)
}

pub fn eigendecompose_with(
    q: &Array2<f64>,
    solver: &dyn EigenSolver,
) -> Result<PrincipalComponents> {
    check_symmetric(q)?;
    let pairs = solver.solve(q)?;
    PrincipalComponents::from_pairs(pairs, max_abs(q))
}

/// Sign-preserving power `sgn(v) ∘ |v|^s`, renormalized to unit ℓ₂ length.
pub fn pow_transform(v: &[f64], s: u32) -> Result<Vec<f64>> {
    if s == 0 {
        return Err(Error::domain("power exponent must be at least 1"));
    }
    let peak = v.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return Err(Error::domain("cannot transform a zero vector"));
    }
    // dividing by the peak first keeps |v_j|^s away from underflow
    let mut out: Vec<f64> = v
        .iter()
        .map(|x| x.signum() * (x.abs() / peak).powi(s as i32))
        .collect();
    let norm = l2_norm(&out);
    out.iter_mut().for_each(|x| *x /= norm);
    Ok(out)
}

/// Limit of [`pow_transform`] as `s → ∞`: the signed axis of the largest
/// magnitude coordinate, ties going to the smallest index.
pub fn axis_limit(v: &[f64]) -> Result<Vec<f64>> {
    let mut best: Option<(usize, f64)> = None;
    for (j, &x) in v.iter().enumerate() {
        if x != 0.0 && best.is_none_or(|(_, b)| x.abs() > b.abs()) {
            best = Some((j, x));
        }
    }
    let (j, x) = best.ok_or_else(|| Error::domain("cannot take the axis of a zero vector"))?;
    let mut out = vec![0.0; v.len()];
    out[j] = x.signum();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn solvers() -> Vec<Arc<dyn EigenSolver>> {
        let r = SolverRegistry::with_builtins();
        r.names().iter().map(|n| r.get(n).unwrap()).collect()
    }

    #[test]
    fn covariance_of_two_points() {
        let d = Dataset::from_rows(vec![vec![0.0, 0.0], vec![2.0, 0.0]], "t").unwrap();
        assert_eq!(
            sample_covariance(&d).unwrap(),
            array![[2.0, 0.0], [0.0, 0.0]]
        );
    }

    #[test]
    fn covariance_of_repeated_point_is_zero() {
        let d = Dataset::from_rows(vec![vec![1.5, -2.0, 3.0]; 7], "t").unwrap();
        assert!(sample_covariance(&d).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn covariance_needs_two_rows() {
        let d = Dataset::from_rows(vec![vec![1.0, 2.0]], "t").unwrap();
        assert!(matches!(
            sample_covariance(&d),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn covariance_matches_naive_formula_across_blocks() {
        // more rows than one block
        let rows: Vec<Vec<f64>> = (0..1300)
            .map(|i| {
                let t = i as f64;
                vec![(t * 0.37).sin(), (t * 0.11).cos() * 2.0, t / 1300.0]
            })
            .collect();
        let d = Dataset::from_rows(rows.clone(), "t").unwrap();
        let q = sample_covariance(&d).unwrap();
        let m = rows.len() as f64;
        let mean: Vec<f64> = (0..3)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m)
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                let naive = rows
                    .iter()
                    .map(|r| (r[i] - mean[i]) * (r[j] - mean[j]))
                    .sum::<f64>()
                    / (m - 1.0);
                assert_abs_diff_eq!(q[[i, j]], naive, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_matrix() {
        for s in solvers() {
            let pc = eigendecompose_with(&array![[3.0, 0.0], [0.0, 1.0]], s.as_ref()).unwrap();
            assert_eq!(pc.eigenvalues(), &[3.0, 1.0]);
            assert_abs_diff_eq!(pc.vector(0)[0], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.vector(1)[1], 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn two_by_two_hand_computed() {
        // characteristic polynomial (2−λ)² − 1 = 0 → λ ∈ {3, 1}
        let r = std::f64::consts::FRAC_1_SQRT_2;
        for s in solvers() {
            let pc = eigendecompose_with(&array![[2.0, 1.0], [1.0, 2.0]], s.as_ref()).unwrap();
            assert_abs_diff_eq!(pc.eigenvalues()[0], 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.eigenvalues()[1], 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.vector(0)[0], r, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.vector(0)[1], r, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.vector(1)[0], r, epsilon = 1e-12);
            assert_abs_diff_eq!(pc.vector(1)[1], -r, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_has_unit_spectrum() {
        let q = Array2::<f64>::eye(5);
        for s in solvers() {
            let pc = eigendecompose_with(&q, s.as_ref()).unwrap();
            assert!(pc.eigenvalues().iter().all(|&l| (l - 1.0).abs() < 1e-14));
        }
    }

    #[test]
    fn rejects_nonsymmetric_and_indefinite() {
        assert!(matches!(
            eigendecompose(&array![[1.0, 2.0], [0.0, 1.0]]),
            Err(Error::NotSymmetric(_))
        ));
        assert!(matches!(
            eigendecompose(&array![[1.0, 0.0], [0.0, -1.0]]),
            Err(Error::Numerical(_))
        ));
        let pc = eigendecompose(&array![[1.0, 0.0], [0.0, -1e-12]]).unwrap();
        assert_eq!(pc.eigenvalues()[1], 0.0);
    }

    #[test]
    fn registry_lookup() {
        let r = SolverRegistry::with_builtins();
        assert_eq!(r.names(), vec!["householder-qr", "jacobi"]);
        assert_eq!(r.get("jacobi").unwrap().name(), "jacobi");
        let err = r.get("lanczos").err().unwrap();
        assert!(err.to_string().contains("householder-qr"));
    }

    #[test]
    fn pow_transform_examples() {
        assert_eq!(
            pow_transform(&[1.0, 0.0, 0.0], 7).unwrap(),
            vec![1.0, 0.0, 0.0]
        );
        let w = pow_transform(&[0.6, 0.8], 2).unwrap();
        assert_abs_diff_eq!(w[0], 0.490_261_24, epsilon = 1e-4);
        assert_abs_diff_eq!(w[1], 0.871_575_54, epsilon = 1e-4);
        let w = pow_transform(&[-0.6, 0.8], 2).unwrap();
        assert_abs_diff_eq!(w[0], -0.490_261_24, epsilon = 1e-4);
        assert_abs_diff_eq!(w[1], 0.871_575_54, epsilon = 1e-4);
        let v = [0.48, -0.6, 0.64];
        let w = pow_transform(&v, 1).unwrap();
        for (a, b) in v.iter().zip(&w) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert!(pow_transform(&[0.0, 0.0], 3).is_err());
        assert!(pow_transform(&[1.0], 0).is_err());
    }

    #[test]
    fn axis_limit_examples() {
        assert_eq!(axis_limit(&[0.6, 0.8]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(axis_limit(&[-0.9, 0.1]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(axis_limit(&[0.5, 0.5]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(axis_limit(&[0.5, -0.5]).unwrap(), vec![1.0, 0.0]);
        assert!(axis_limit(&[0.0, 0.0]).is_err());
    }
}
