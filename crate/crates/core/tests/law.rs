use std::sync::Arc;
use regret_contest::closed_form::PowerLaw;
use regret_contest::model::RegretMode;
use regret_contest::quad;
use regret_contest::law::*;


fn power(n: f64) -> EquilibriumCdf {
    EquilibriumCdf::PowerLaw(PowerLaw::new(n, 1.0).unwrap())
}

#[test]
fn tabulated_reproduces_power_law() {
    let f = power(2.0);
    let xs: Vec<f64> = (0..=200).map(|i| i as f64 * 0.01).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| f.cdf(x)).collect();
    let t = TabulatedCdf::new(xs, gs).unwrap();
    assert!((t.cdf(0.777) - 0.3885).abs() < 1e-12);
    assert!((t.partial_mean(2.0) - 1.0).abs() < 1e-12);
    assert!((t.quantile(0.25) - 0.5).abs() < 1e-9);
}

#[test]
fn tabulated_rejects_decreasing_cdf() {
    assert!(TabulatedCdf::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.6, 0.5]).is_err());
    assert!(TabulatedCdf::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.9]).is_err());
}

#[test]
fn generic_perkins_map_for_uniform() {
    // G uniform on [0, 2]: Doob gives m(1 + p/2 - m/2) - 1 + m²/4 - p²/4 = 0.
    let law: Arc<dyn Marginal> = Arc::new(power(2.0));
    let map = PerkinsMap::generic(law, 1.0);
    assert!((map.phi(1.0) - 1.0).abs() < 1e-12);
    assert!(map.phi(2.0).abs() < 1e-12);
    for i in 1..20 {
        let m = 1.0 + i as f64 * 0.05;
        let p = map.phi(m);
        let res = m * (1.0 + p / 2.0 - m / 2.0) - 1.0 + m * m / 4.0 - p * p / 4.0;
        assert!(res.abs() < 1e-12, "m={m} res={res}");
        assert!((map.big_phi(p) - m).abs() < 1e-10);
    }
}

#[test]
fn future_kernel_half_at_double() {
    let law = JointLaw::for_marginal(Arc::new(power(3.0)), RegretMode::FutureRegret, 1.0);
    let samples = sample_joint(&law, 200_000, 3).unwrap();
    // P(M ≤ 2 | X ≈ 1) = 1/2.
    let near: Vec<_> = samples.iter().filter(|(x, _)| (x - 1.0).abs() < 0.02).collect();
    let frac = near.iter().filter(|(x, m)| *m <= 2.0 * x).count() as f64 / near.len() as f64;
    assert!((frac - 0.5).abs() < 4.0 * (0.25 / near.len() as f64).sqrt(), "{frac}");
}

#[test]
fn future_joint_cdf_matches_kernel_integral() {
    let law = JointLaw::for_marginal(Arc::new(power(3.0)), RegretMode::FutureRegret, 1.0);
    let g = power(3.0);
    for &(x, y) in &[(0.5, 1.0), (1.0, 2.5), (2.0, 2.0), (3.0, 10.0)] {
        let direct = quad::adaptive(|z| (y - z) / y * g.density(z), 1e-300, f64::min(x, y), 1e-13, 1e-12);
        assert!((law.future_joint_cdf(x, y).unwrap() - direct).abs() < 1e-8);
    }
}

#[test]
fn path_maximum_cannot_be_sampled_from_the_law() {
    let law = JointLaw::for_marginal(Arc::new(power(3.0)), RegretMode::AllRegret, 1.0);
    assert!(sample_joint(&law, 10, 1).is_err());
}

#[test]
fn sampling_is_reproducible() {
    let law = JointLaw::for_marginal(Arc::new(power(2.0)), RegretMode::FutureRegret, 1.0);
    assert_eq!(sample_joint(&law, 100, 9).unwrap(), sample_joint(&law, 100, 9).unwrap());
    assert_ne!(sample_joint(&law, 100, 9).unwrap(), sample_joint(&law, 100, 10).unwrap());
}

#[test]
fn xi_survival_is_one_at_start_and_decreasing() {
    let law: Arc<dyn Marginal> = Arc::new(power(2.0));
    let map = PerkinsMap::generic(law.clone(), 1.0);
    assert_eq!(perkins_xi_survival(law.as_ref(), &map, 1.0).unwrap(), 1.0);
    let mut prev = 1.0;
    for i in 1..40 {
        let s = 1.0 + i as f64 * 0.025;
        let v = perkins_xi_survival(law.as_ref(), &map, s).unwrap();
        assert!(v <= prev + 1e-15);
        prev = v;
    }
    assert!(perkins_xi_survival(law.as_ref(), &map, 0.5).is_err());
}
