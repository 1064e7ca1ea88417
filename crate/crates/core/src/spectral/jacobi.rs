use ndarray::Array2;

use super::{EigenPairs, EigenSolver};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations.
///
/// Each rotation annihilates one off-diagonal entry; sweeping the upper
/// triangle repeatedly drives the off-diagonal mass to zero quadratically
/// once it is small. Accurate to working precision for every symmetric
/// matrix, but `O(n³)` per sweep with a large constant, so it is meant for
/// moderate `n` and as an independent check on [`super::HouseholderQr`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Jacobi;

impl EigenSolver for Jacobi {
    fn name(&self) -> &'static str {
        "jacobi"
    }

    fn solve(&self, q: &Array2<f64>) -> Result<EigenPairs> {
        let n = q.nrows();
        let mut a: Vec<f64> = q.iter().copied().collect();
        let mut v = vec![0.0; n * n];
        for i in 0..n {
            v[i * n + i] = 1.0;
        }

        let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let mut converged = n < 2 || frob == 0.0;
        for _ in 0..MAX_SWEEPS {
            if converged {
                break;
            }
            let off: f64 = (0..n)
                .flat_map(|p| (p + 1..n).map(move |r| (p, r)))
                .map(|(p, r)| a[p * n + r].powi(2))
                .sum::<f64>()
                .sqrt();
            if off <= 1e-15 * frob {
                converged = true;
                break;
            }
            for p in 0..n {
                for r in p + 1..n {
                    rotate(&mut a, &mut v, n, p, r);
                }
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "jacobi did not converge in {MAX_SWEEPS} sweeps"
            )));
        }

        let values = (0..n).map(|i| a[i * n + i]).collect();
        let vectors = Array2::from_shape_vec((n, n), v).expect("square");
        Ok(EigenPairs { values, vectors })
    }
}

/// Applies the rotation in the (p, r) plane that zeroes `a[p][r]`.
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, r: usize) {
    let apr = a[p * n + r];
    if apr == 0.0 {
        return;
    }
    let (app, arr) = (a[p * n + p], a[r * n + r]);
    let theta = (arr - app) / (2.0 * apr);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p * n + p] = app - t * apr;
    a[r * n + r] = arr + t * apr;
    a[p * n + r] = 0.0;
    a[r * n + p] = 0.0;
    for k in 0..n {
        if k == p || k == r {
            continue;
        }
        let g = a[k * n + p];
        let h = a[k * n + r];
        let gp = g - s * (h + g * tau);
        let hp = h + s * (g - h * tau);
        a[k * n + p] = gp;
        a[p * n + k] = gp;
        a[k * n + r] = hp;
        a[r * n + k] = hp;
    }
    for k in 0..n {
        let g = v[k * n + p];
        let h = v[k * n + r];
        v[k * n + p] = g - s * (h + g * tau);
        v[k * n + r] = h + s * (g - h * tau);
    }
}
