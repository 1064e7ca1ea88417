use concentrate::analytic::GaussianSpec;
use concentrate::data::sample_gaussian;
use concentrate::eval::{convergence_sweep, run_trials, split};
use concentrate::search::SearchConfig;
use concentrate::{ConcentrationProblem, Dataset, Error, LpMetric};
use proptest::prelude::*;

fn numbered(m: usize) -> Dataset {
    Dataset::from_rows(
        (0..m).map(|i| vec![i as f64, (i * i % 7) as f64]).collect(),
        "n",
    )
    .unwrap()
}

fn cfg() -> SearchConfig {
    SearchConfig::with_defaults(ConcentrationProblem::new(0.2, 0.1, LpMetric::linf()).unwrap())
}

proptest! {
    #[test]
    fn split_is_a_sorted_partition(m in 2usize..300, fraction in 0.01..0.99f64, seed in any::<u64>()) {
        let d = numbered(m);
        let (train, test) = split(&d, fraction, seed).unwrap();
        prop_assert_eq!(train.m() + test.m(), m);
        prop_assert!(train.m() >= 1 && test.m() >= 1);
        let ids = |x: &Dataset| x.rows().map(|r| r[0] as usize).collect::<Vec<_>>();
        let (a, b) = (ids(&train), ids(&test));
        prop_assert!(a.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(b.windows(2).all(|w| w[0] < w[1]));
        let mut all = [a, b].concat();
        all.sort_unstable();
        prop_assert_eq!(all, (0..m).collect::<Vec<_>>());
        let (again, _) = split(&d, fraction, seed).unwrap();
        prop_assert_eq!(again.as_slice(), train.as_slice());
    }
}

#[test]
fn trials_are_reproducible_and_seeded_per_trial() {
    let data = sample_gaussian(&GaussianSpec::spherical(5, 1.0).unwrap(), 400, 1).unwrap();
    let a = run_trials(&data, &cfg(), 3, 10, 0.5).unwrap();
    let b = run_trials(&data, &cfg(), 3, 10, 0.5).unwrap();
    assert_eq!(a, b);
    // trial 1 of base 10 equals trial 0 of base 11
    let c = run_trials(&data, &cfg(), 1, 11, 0.5).unwrap();
    assert_eq!(a.estimates[1], c.estimates[0]);
    for e in &a.estimates {
        assert!(e.train_risk >= 0.2);
        assert!(e.test_adv_risk >= e.test_risk);
    }
}

#[test]
fn zero_epsilon_collapses_adversarial_risk() {
    let data = sample_gaussian(&GaussianSpec::spherical(4, 1.0).unwrap(), 300, 2).unwrap();
    let c =
        SearchConfig::with_defaults(ConcentrationProblem::new(0.3, 0.0, LpMetric::l2()).unwrap());
    let r = run_trials(&data, &c, 2, 0, 0.5).unwrap();
    for e in &r.estimates {
        assert_eq!(e.train_adv_risk, e.train_risk);
        assert_eq!(e.test_adv_risk, e.test_risk);
    }
}

#[test]
fn sweep_is_sorted_and_checks_sizes() {
    let data = sample_gaussian(&GaussianSpec::spherical(3, 1.0).unwrap(), 500, 4).unwrap();
    let pts = convergence_sweep(&data, &cfg(), &[200, 50, 100, 50], 100, 2, 0).unwrap();
    let sizes: Vec<usize> = pts.iter().map(|p| p.train_size).collect();
    assert_eq!(sizes, vec![50, 100, 200]);
    assert_eq!(
        pts,
        convergence_sweep(&data, &cfg(), &[50, 100, 200], 100, 2, 0).unwrap()
    );
    assert!(matches!(
        convergence_sweep(&data, &cfg(), &[450], 100, 1, 0),
        Err(Error::InsufficientData(_))
    ));
    assert!(matches!(
        convergence_sweep(&data, &cfg(), &[1], 100, 1, 0),
        Err(Error::Domain(_))
    ));
}
