use ndarray::{Array2, Axis};
use rayon::prelude::*;

use crate::analytic::{Covariance, GaussianSpec};
use crate::error::{Error, Result};
use crate::rng::{fill_standard_normal, stream};
use crate::types::Dataset;

/// Rows drawn from one RNG stream.
const SAMPLE_BLOCK: usize = 256;

/// Draws `m` rows `θ + Σ^{1/2} u` with `u ~ N(0, I)`. Row block `j` uses
/// stream `(seed, j)`, so the output depends only on `(spec, m, seed)`.
pub fn sample_gaussian(spec: &GaussianSpec, m: usize, seed: u64) -> Result<Dataset> {
    if m == 0 {
        return Err(Error::domain("sample count must be at least 1"));
    }
    let n = spec.dim();
    let root = match spec.covariance() {
        Covariance::Full { .. } => Some(spec.sqrt_covariance()),
        _ => None,
    };
    let mut samples = Array2::<f64>::zeros((m, n));
    samples
        .axis_chunks_iter_mut(Axis(0), SAMPLE_BLOCK)
        .into_par_iter()
        .enumerate()
        .for_each(|(j, mut block)| {
            let mut rng = stream(seed, j as u64);
            let rows = block.nrows();
            let mut u = vec![0.0; rows * n];
            fill_standard_normal(&mut rng, &mut u);
            let u = Array2::from_shape_vec((rows, n), u).expect("block shape");
            match spec.covariance() {
                Covariance::Spherical(s2) => block.assign(&(u * s2.sqrt())),
                Covariance::Diagonal(d) => {
                    let scale = ndarray::Array1::from_iter(d.iter().map(|v| v.sqrt()));
                    block.assign(&(u * &scale));
                }
                // Σ^{1/2} is symmetric, so row-wise Σ^{1/2}u is u·Σ^{1/2}
                Covariance::Full { .. } => block.assign(&u.dot(root.as_ref().unwrap())),
            }
            block += &ndarray::ArrayView1::from(spec.theta());
        });
    Dataset::new(
        samples,
        format!(
            "synthetic:gaussian:{}:seed={seed}",
            spec.covariance().kind()
        ),
    )
}
