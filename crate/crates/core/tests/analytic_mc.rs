//! Monte-Carlo checks of the Gaussian closed forms.

use concentrate::analytic::{
    gii_lower_bound, optimal_halfspace, std_normal_cdf, Covariance, GaussianSpec,
};
use concentrate::data::sample_gaussian;
use concentrate::geometry::{empirical_measure, expand};
use concentrate::rng::{fill_standard_normal, stream};
use concentrate::search::quantile_bias;
use concentrate::{HalfSpace, LpMetric};
use ndarray::array;

const M: usize = 200_000;

fn tolerance(p: f64) -> f64 {
    4.0 * (p * (1.0 - p) / M as f64).sqrt() + 1e-4
}

fn specs() -> Vec<GaussianSpec> {
    vec![
        GaussianSpec::spherical(3, 1.0).unwrap(),
        GaussianSpec::new(
            vec![0.5, -1.0, 0.0],
            Covariance::Diagonal(vec![0.25, 2.0, 1.0]),
        )
        .unwrap(),
        GaussianSpec::new(
            vec![0.0, 1.0, 0.0],
            Covariance::full(array![[2.0, 0.6, 0.0], [0.6, 1.0, 0.3], [0.0, 0.3, 0.5]]).unwrap(),
        )
        .unwrap(),
    ]
}

#[test]
fn optimal_half_space_attains_the_bound() {
    for (i, spec) in specs().iter().enumerate() {
        let data = sample_gaussian(spec, M, 100 + i as u64).unwrap();
        let metrics: Vec<LpMetric> = match spec.covariance() {
            Covariance::Full { .. } => vec![LpMetric::l2()],
            _ => vec![LpMetric::l2(), "l3".parse().unwrap(), LpMetric::linf()],
        };
        for metric in metrics {
            for (alpha, eps) in [(0.05, 0.4), (0.3, 1.0), (0.5, 0.2)] {
                let (h, _) = optimal_halfspace(spec, alpha, metric).unwrap();
                let risk = empirical_measure(&data, &h).unwrap();
                assert!(
                    (risk - alpha).abs() < tolerance(alpha),
                    "spec {i} {metric}: {risk}"
                );
                let bound = gii_lower_bound(spec, alpha, eps, metric).unwrap();
                let adv = empirical_measure(&data, &expand(&h, eps, metric)).unwrap();
                assert!(
                    (adv - bound).abs() < tolerance(bound),
                    "spec {i} {metric} α={alpha} ε={eps}: {adv} vs {bound}"
                );
            }
        }
    }
}

#[test]
fn random_half_spaces_expand_at_least_as_much_as_the_bound() {
    let spec = &specs()[1];
    let data = sample_gaussian(spec, M, 7).unwrap();
    let mut rng = stream(99, 0);
    for metric in [LpMetric::l2(), LpMetric::linf()] {
        for _ in 0..20 {
            let mut w = vec![0.0; 3];
            fill_standard_normal(&mut rng, &mut w);
            let b = quantile_bias(&data, &w_unit(&w), 0.2).unwrap();
            let h = HalfSpace::new(w_unit(&w), b).unwrap();
            let alpha = empirical_measure(&data, &h).unwrap();
            let bound = gii_lower_bound(spec, alpha, 0.5, metric).unwrap();
            let adv = empirical_measure(&data, &expand(&h, 0.5, metric)).unwrap();
            assert!(adv >= bound - tolerance(bound), "{metric}: {adv} < {bound}");
        }
    }
}

fn w_unit(w: &[f64]) -> Vec<f64> {
    let n = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    w.iter().map(|v| v / n).collect()
}

#[test]
fn sampler_matches_marginal_cdf() {
    let spec = &specs()[2];
    let data = sample_gaussian(spec, M, 3).unwrap();
    // coordinate 1 has mean 1 and variance 1
    for t in [-1.0, 0.0, 1.0, 2.5] {
        let frac = data.rows().filter(|r| r[1] <= t).count() as f64 / M as f64;
        let want = std_normal_cdf(t - 1.0);
        assert!(
            (frac - want).abs() < tolerance(want),
            "t = {t}: {frac} vs {want}"
        );
    }
}
