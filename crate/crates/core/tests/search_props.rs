use concentrate::analytic::{gii_lower_bound, GaussianSpec};
use concentrate::data::sample_gaussian;
use concentrate::geometry::empirical_measure;
use concentrate::search::{
    adv_risk, quantile_bias, search_halfspace, SearchConfig, DEFAULT_EXPONENTS,
};
use concentrate::spectral::{axis_limit, eigendecompose, pow_transform, sample_covariance};
use concentrate::{ConcentrationProblem, Dataset, HalfSpace, LpMetric};
use proptest::prelude::*;

fn metrics() -> impl Strategy<Value = LpMetric> {
    prop_oneof![
        Just(LpMetric::l1()),
        Just(LpMetric::l2()),
        Just("l3".parse().unwrap()),
        Just(LpMetric::linf()),
    ]
}

fn datasets() -> impl Strategy<Value = Dataset> {
    (1usize..=5, 2usize..=60)
        .prop_flat_map(|(n, m)| {
            prop::collection::vec(
                prop::collection::vec(prop_oneof![4 => -3.0..3.0f64, 1 => Just(0.5)], n),
                m,
            )
        })
        .prop_map(|rows| Dataset::from_rows(rows, "p").unwrap())
}

/// Every candidate the search considers, scored independently through the
/// public building blocks.
fn best_candidate(data: &Dataset, problem: &ConcentrationProblem) -> f64 {
    let pcs = eigendecompose(&sample_covariance(data).unwrap()).unwrap();
    let mut best = f64::INFINITY;
    for i in 0..pcs.len() {
        let v = pcs.vector(i);
        let mut dirs: Vec<Vec<f64>> = DEFAULT_EXPONENTS
            .iter()
            .map(|&s| pow_transform(v, s).unwrap())
            .collect();
        dirs.push(axis_limit(v).unwrap());
        for d in dirs {
            for w in [d.clone(), d.iter().map(|x| -x).collect()] {
                let b = quantile_bias(data, &w, problem.alpha()).unwrap();
                let h = HalfSpace::new(w, b).unwrap();
                best = best.min(adv_risk(data, &h, problem).unwrap());
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn returned_half_space_is_feasible_and_consistent(
        data in datasets(),
        metric in metrics(),
        alpha in 0.01..0.99f64,
        eps in 0.0..2.0f64,
    ) {
        let problem = ConcentrationProblem::new(alpha, eps, metric).unwrap();
        let cfg = SearchConfig::with_defaults(problem);
        let out = search_halfspace(&data, &cfg).unwrap();
        prop_assert!(out.train_risk >= alpha);
        prop_assert!(out.train_adv_risk >= out.train_risk);
        prop_assert_eq!(out.train_risk, empirical_measure(&data, &out.half_space).unwrap());
        prop_assert_eq!(out.train_adv_risk, adv_risk(&data, &out.half_space, &problem).unwrap());
        prop_assert!((concentrate::types::dot(out.half_space.w(), out.half_space.w()) - 1.0).abs() < 1e-9);
        prop_assert_eq!(search_halfspace(&data, &cfg).unwrap(), out);
    }

    #[test]
    fn search_finds_the_best_candidate(
        data in datasets(),
        metric in metrics(),
        alpha in 0.01..0.99f64,
        eps in 0.0..2.0f64,
    ) {
        let problem = ConcentrationProblem::new(alpha, eps, metric).unwrap();
        let out = search_halfspace(&data, &SearchConfig::with_defaults(problem)).unwrap();
        let best = best_candidate(&data, &problem);
        let m = data.m() as f64;
        // batched projections may round a boundary point differently
        prop_assert!(out.train_adv_risk <= best + 1.0 / m + 1e-12, "{} vs {}", out.train_adv_risk, best);
    }
}

#[test]
fn isotropic_gaussian_under_linf_picks_a_near_axis_direction() {
    let spec = GaussianSpec::spherical(50, 1.0).unwrap();
    let data = sample_gaussian(&spec, 5000, 11).unwrap();
    let problem = ConcentrationProblem::new(0.05, 0.3, LpMetric::linf()).unwrap();
    let out = search_halfspace(&data, &SearchConfig::with_defaults(problem)).unwrap();
    let l1: f64 = out.half_space.w().iter().map(|v| v.abs()).sum();
    assert!(l1 <= 1.5, "‖w‖₁ = {l1}");
}

#[test]
fn gaussian_l2_estimate_tracks_closed_form() {
    let spec = GaussianSpec::spherical(10, 1.0).unwrap();
    let train = sample_gaussian(&spec, 20_000, 5).unwrap();
    let test = sample_gaussian(&spec, 20_000, 6).unwrap();
    let metric = LpMetric::l2();
    let problem = ConcentrationProblem::new(0.1, 0.5, metric).unwrap();
    let out = search_halfspace(&train, &SearchConfig::with_defaults(problem)).unwrap();
    let test_adv = adv_risk(&test, &out.half_space, &problem).unwrap();
    let bound = gii_lower_bound(&spec, 0.1, 0.5, metric).unwrap();
    assert!((test_adv - bound).abs() < 0.015, "{test_adv} vs {bound}");
}
