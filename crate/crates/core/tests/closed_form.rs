use regret_contest::model::{ContestSpec, RegretMode};
use regret_contest::closed_form::*;

use regret_contest::law::Marginal;
use regret_contest::quad;
use proptest::prelude::*;

fn spec(n: u32, x0: f64, k: f64, mode: RegretMode) -> ContestSpec {
    ContestSpec::new(n, x0, k, mode).unwrap()
}

#[test]
fn two_players_is_uniform() {
    let f = no_regret_cdf(&spec(2, 1.0, 0.0, RegretMode::NoRegret)).unwrap();
    for i in 0..=20 {
        let x = i as f64 * 0.1;
        assert!((f.eval(x) - x / 2.0).abs() < 1e-15);
    }
    assert_eq!(f.eval(3.0), 1.0);
}

#[test]
fn three_players_hand_value() {
    let f = no_regret_cdf(&spec(3, 1.0, 0.0, RegretMode::NoRegret)).unwrap();
    assert!((f.eval(1.5) - 0.5f64.sqrt()).abs() < 1e-15);
    let m = quad::adaptive(|x| 1.0 - f.eval(x), 0.0, 3.0, 1e-13, 1e-13);
    assert!((m - 1.0).abs() < 1e-10);
}

#[test]
fn endpoints() {
    for (n, x0) in [(2, 1.0), (4, 0.3), (7, 5.0)] {
        let f = no_regret_cdf(&spec(n, x0, 0.0, RegretMode::NoRegret)).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(n as f64 * x0), 1.0);
    }
}

#[test]
fn future_regret_effective_count() {
    let f = future_regret_cdf(&spec(2, 1.0, 1.0, RegretMode::FutureRegret)).unwrap();
    assert!((f.eval(1.2) - (0.4f64).sqrt()).abs() < 1e-15);
    assert_eq!(f.support_end(), 3.0);
    assert_eq!(spec(3, 1.0, 2.0, RegretMode::FutureRegret).effective_n(), 7.0);
}

#[test]
fn future_regret_at_zero_penalty_is_standard() {
    let a = future_regret_cdf(&spec(4, 1.3, 0.0, RegretMode::FutureRegret)).unwrap();
    let b = no_regret_cdf(&spec(4, 1.3, 0.0, RegretMode::NoRegret)).unwrap();
    for i in 0..=600 {
        let x = i as f64 * 0.01;
        assert_eq!(a.eval(x), b.eval(x));
    }
}

#[test]
fn all_regret_ignores_penalty() {
    let a = all_regret_cdf(&spec(3, 1.0, 5.0, RegretMode::AllRegret)).unwrap();
    for i in 0..=300 {
        let x = i as f64 * 0.01;
        assert!((a.eval(x) - (x / 3.0).sqrt().min(1.0)).abs() < 1e-15);
    }
}

#[test]
fn wrong_mode_is_rejected() {
    assert!(no_regret_cdf(&spec(2, 1.0, 1.0, RegretMode::PastRegret)).is_err());
}

#[test]
fn density_is_infinite_at_zero_beyond_two() {
    let p = PowerLaw::new(3.0, 1.0).unwrap();
    assert!(p.density(0.0).is_infinite());
    assert!((PowerLaw::new(2.0, 1.0).unwrap().density(0.0) - 0.5).abs() < 1e-15);
}

#[test]
fn future_cdfs_cross_once_and_endpoint_grows() {
    let a = PowerLaw::new(2.0 + 0.5, 1.0).unwrap();
    let b = PowerLaw::new(2.0 + 2.0, 1.0).unwrap();
    assert!(b.right_endpoint() > a.right_endpoint());
    let mut sign_changes = 0;
    let mut prev = 0.0f64;
    for i in 1..4000 {
        let x = i as f64 * 1e-3;
        let d = a.eval(x) - b.eval(x);
        if d != 0.0 {
            if prev != 0.0 && d.signum() != prev.signum() {
                sign_changes += 1;
            }
            prev = d;
        }
    }
    assert_eq!(sign_changes, 1);
}

proptest! {
    #[test]
    fn quantile_inverts_eval(n in 2.0f64..12.0, x0 in 0.1f64..5.0, p in 0.001f64..0.999) {
        let f = PowerLaw::new(n, x0).unwrap();
        let x = f.quantile(p);
        prop_assert!((f.eval(x) - p).abs() < 1e-12);
    }

    #[test]
    fn mean_is_start(n in 2.0f64..12.0, x0 in 0.1f64..5.0) {
        let f = PowerLaw::new(n, x0).unwrap();
        prop_assert!((f.mean() - x0).abs() < 1e-12 * x0);
    }
}
