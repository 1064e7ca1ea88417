use concentrate::spectral::{
    axis_limit, eigendecompose, eigendecompose_with, pow_transform, sample_covariance, Jacobi,
    SolverRegistry,
};
use concentrate::Dataset;
use ndarray::Array2;
use proptest::prelude::*;

fn spd(n: usize) -> impl Strategy<Value = Array2<f64>> {
    prop::collection::vec(-2.0..2.0f64, n * n).prop_map(move |a| {
        let a = Array2::from_shape_vec((n, n), a).unwrap();
        a.t().dot(&a) + Array2::<f64>::eye(n) * 0.1
    })
}

fn reconstruct(pcs: &concentrate::spectral::PrincipalComponents) -> Array2<f64> {
    let v = pcs.vectors();
    let d = Array2::from_diag(&ndarray::Array1::from(pcs.eigenvalues().to_vec()));
    v.t().dot(&d).dot(v)
}

proptest! {
    #[test]
    fn decomposition_is_orthonormal_sorted_and_reconstructs(q in (1usize..=8).prop_flat_map(spd)) {
        let pcs = eigendecompose(&q).unwrap();
        let n = q.nrows();
        let vals = pcs.eigenvalues();
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let gram = pcs.vectors().dot(&pcs.vectors().t());
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((gram[[i, j]] - want).abs() < 1e-10);
            }
        }
        let scale = q.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        let r = reconstruct(&pcs);
        prop_assert!(r.iter().zip(q.iter()).all(|(a, b)| (a - b).abs() < 1e-10 * scale));
        for i in 0..n {
            let v = pcs.vector(i);
            let first = v.iter().find(|x| x.abs() > 1e-10).unwrap();
            prop_assert!(*first > 0.0);
        }
    }

    #[test]
    fn jacobi_agrees_with_householder(q in (1usize..=8).prop_flat_map(spd)) {
        let a = eigendecompose(&q).unwrap();
        let b = eigendecompose_with(&q, &Jacobi).unwrap();
        let scale = a.eigenvalues()[0].max(1.0);
        for (x, y) in a.eigenvalues().iter().zip(b.eigenvalues()) {
            prop_assert!((x - y).abs() < 1e-9 * scale);
        }
        // eigenvectors are only comparable where eigenvalues are well separated
        let vals = a.eigenvalues();
        for i in 0..vals.len() {
            let gap = (0..vals.len())
                .filter(|&j| j != i)
                .map(|j| (vals[i] - vals[j]).abs())
                .fold(f64::INFINITY, f64::min);
            if gap > 1e-3 * scale {
                let d: f64 = a.vector(i).iter().zip(b.vector(i)).map(|(x, y)| x * y).sum();
                prop_assert!((d.abs() - 1.0).abs() < 1e-6, "component {i}: {d}");
            }
        }
    }

    #[test]
    fn pow_transform_is_unit_sign_preserving_and_concentrates(
        v in prop::collection::vec(-1.0..1.0f64, 1..12),
    ) {
        prop_assume!(v.iter().any(|x| x.abs() > 1e-6));
        let linf = |u: &[f64]| u.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let mut prev = 0.0;
        for s in [1u32, 2, 4, 8, 16, 32, 64] {
            let u = pow_transform(&v, s).unwrap();
            let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < 1e-12);
            for (a, b) in u.iter().zip(&v) {
                prop_assert!(*a == 0.0 || a.signum() == b.signum());
            }
            let peak = linf(&u);
            prop_assert!(peak >= prev - 1e-12, "s = {s}");
            prev = peak;
        }
        let a = axis_limit(&v).unwrap();
        prop_assert_eq!(a.iter().filter(|x| **x != 0.0).count(), 1);
    }
}

#[test]
fn covariance_of_a_diagonal_sample_recovers_the_axis() {
    // variance 9 on axis 2, 1 elsewhere, built deterministically
    let mut rows = Vec::new();
    for i in 0..400 {
        let t = i as f64 / 400.0 * std::f64::consts::TAU;
        rows.push(vec![
            t.cos(),
            (2.0 * t).sin(),
            3.0 * (3.0 * t).cos(),
            (5.0 * t).sin(),
        ]);
    }
    let data = Dataset::from_rows(rows, "wave").unwrap();
    let pcs = eigendecompose(&sample_covariance(&data).unwrap()).unwrap();
    let top = pcs.vector(0);
    assert!((top[2].abs() - 1.0).abs() < 1e-9, "{top:?}");
    assert!((pcs.eigenvalues()[0] - 4.5 * 400.0 / 399.0).abs() < 1e-9);
}

#[test]
fn registry_lists_and_rejects() {
    let reg = SolverRegistry::with_builtins();
    let names = reg.names();
    assert!(names.contains(&"householder-qr") && names.contains(&"jacobi"));
    let err = reg.get("lanczos").err().unwrap().to_string();
    assert!(err.contains("lanczos") && err.contains("jacobi"), "{err}");
}
