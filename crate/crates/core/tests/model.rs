use regret_contest::error::Error;
use regret_contest::model::*;

use proptest::prelude::*;

fn spec(k: f64, k2: f64, mode: RegretMode) -> ContestSpec {
    ContestSpec::new(3, 1.0, k, mode).unwrap().with_k2(k2).unwrap()
}

#[test]
fn strict_winner_gets_one() {
    let s = spec(2.0, 1.0, RegretMode::PastRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(2.0, 2.0, vec![1.0, 0.5])).unwrap();
    assert_eq!(v, 1.0);
}

#[test]
fn regret_penalty_when_maximum_would_have_won() {
    let s = spec(2.0, 1.0, RegretMode::PastRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(0.5, 1.8, vec![1.0])).unwrap();
    assert_eq!(v, -2.0);
}

#[test]
fn no_penalty_without_winning_alternative() {
    let s = spec(2.0, 1.0, RegretMode::PastRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(0.5, 0.8, vec![1.0])).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn tie_penalty_when_maximum_equals_best_opponent() {
    let s = spec(2.0, 0.5, RegretMode::PastRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(0.5, 1.0, vec![1.0])).unwrap();
    assert_eq!(v, -0.5);
}

#[test]
fn ties_split_the_prize() {
    let s = spec(1.0, 0.5, RegretMode::NoRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(1.0, 1.0, vec![1.0, 1.0, 0.2])).unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn no_regret_mode_ignores_penalty() {
    let s = spec(2.0, 1.0, RegretMode::NoRegret);
    let v = realized_payoff(&s, &PayoffOutcome::new(0.5, 1.8, vec![1.0])).unwrap();
    assert_eq!(v, 0.0);
}

#[test]
fn negative_inputs_are_rejected() {
    let s = spec(1.0, 0.5, RegretMode::PastRegret);
    assert!(matches!(
        realized_payoff(&s, &PayoffOutcome::new(-0.1, 1.0, vec![1.0])),
        Err(Error::Domain { .. })
    ));
    assert!(realized_payoff(&s, &PayoffOutcome::new(0.1, 1.0, vec![-1.0])).is_err());
    assert!(realized_payoff(&s, &PayoffOutcome::new(0.1, 1.0, vec![])).is_err());
}

/// Brute-force table: enumerate every ordering of (x, max, opponent)
/// over a small value set and compare against a direct reading of the
/// indicator definition.
#[test]
fn payoff_matches_indicator_table() {
    let vals = [0.0, 0.5, 1.0, 1.5];
    let s = spec(2.0, 0.5, RegretMode::PastRegret);
    for &x in &vals {
        for &m in vals.iter().filter(|&&m| m >= x) {
            for &o1 in &vals {
                for &o2 in &vals {
                    let all = [x, o1, o2];
                    let top = all.iter().copied().fold(f64::MIN, f64::max);
                    let k = all.iter().filter(|&&v| v == top).count() as f64;
                    let best = o1.max(o2);
                    let expected = if x == top { 1.0 / k } else { 0.0 }
                        - if x < best && best < m { 2.0 } else { 0.0 }
                        - if x < best && best == m { 0.5 } else { 0.0 };
                    let got = realized_payoff(&s, &PayoffOutcome::new(x, m, vec![o1, o2])).unwrap();
                    assert_eq!(got, expected, "x={x} m={m} o=({o1},{o2})");
                }
            }
        }
    }
}

#[test]
fn spec_validation() {
    assert!(ContestSpec::new(1, 1.0, 0.0, RegretMode::NoRegret).is_err());
    assert!(ContestSpec::new(2, 0.0, 0.0, RegretMode::NoRegret).is_err());
    assert!(ContestSpec::new(2, 1.0, -1.0, RegretMode::PastRegret).is_err());
    let s = ContestSpec::new(2, 1.0, 1.0, RegretMode::PastRegret).unwrap();
    assert_eq!(s.k2, 0.5);
    assert!(s.with_k2(1.5).is_err());
    let f = ContestSpec::new(3, 1.0, 2.0, RegretMode::FutureRegret).unwrap();
    assert_eq!(f.effective_n(), 7.0);
}

#[test]
fn mode_parsing_round_trips() {
    for m in RegretMode::ALL {
        assert_eq!(m.as_str().parse::<RegretMode>().unwrap(), m);
    }
    assert!("sideways".parse::<RegretMode>().is_err());
}

#[test]
fn identity_scale() {
    assert_eq!(scale_transform(&ScaleFunction::Identity, 1.7).unwrap(), 1.7);
}

#[test]
fn exponential_bm_scale() {
    let sf = ScaleFunction::exponential_bm(1.0, 0.25).unwrap();
    assert!((sf.kappa().unwrap() - 0.5).abs() < 1e-15);
    assert!((scale_transform(&sf, 4.0).unwrap() - 2.0).abs() < 1e-14);
    assert!((scale_inverse(&sf, 2.0).unwrap() - 4.0).abs() < 1e-12);
    assert!(ScaleFunction::exponential_bm(1.0, 0.5).is_err());
}

#[test]
fn drifting_bm_scale() {
    let sf = ScaleFunction::drifting_bm(1.0, -0.5).unwrap();
    assert!((scale_transform(&sf, 2.0).unwrap() - 2f64.exp()).abs() < 1e-12);
    // Increasing, and vanishing toward the lower boundary.
    let mut prev = 0.0;
    for i in -400..=40 {
        let v = scale_transform(&sf, i as f64 * 0.1).unwrap();
        assert!(v > prev);
        prev = v;
    }
    assert!(scale_transform(&sf, -40.0).unwrap() < 1e-17);
    assert!(ScaleFunction::drifting_bm(1.0, 0.1).is_err());
}

#[test]
fn custom_scale_requires_monotone_table() {
    assert!(ScaleFunction::custom(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]).is_err());
    assert!(ScaleFunction::custom(vec![0.0, 1.0], vec![0.5, 2.0]).is_err());
    let sf = ScaleFunction::custom(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.5, 2.0, 5.0]).unwrap();
    for i in 0..=300 {
        let y = i as f64 * 0.01;
        let x = scale_transform(&sf, y).unwrap();
        assert!((scale_inverse(&sf, x).unwrap() - y).abs() < 1e-9);
    }
}

proptest! {
    #[test]
    fn payoff_is_invariant_under_increasing_maps(
        x in 0.0f64..3.0, dm in 0.0f64..2.0,
        opp in proptest::collection::vec(0.0f64..4.0, 1..4),
        k in 0.0f64..3.0, frac in 0.0f64..1.0,
    ) {
        let s = ContestSpec::new(opp.len() as u32 + 1, 1.0, k, RegretMode::PastRegret).unwrap()
            .with_k2(k * frac).unwrap();
        let base = realized_payoff(&s, &PayoffOutcome::new(x, x + dm, opp.clone())).unwrap();
        let g = |v: f64| v.powi(3) + 2.0 * v;
        let mapped = realized_payoff(
            &s,
            &PayoffOutcome::new(g(x), g(x + dm), opp.iter().map(|&v| g(v)).collect()),
        ).unwrap();
        prop_assert_eq!(base, mapped);
    }

    #[test]
    fn scale_round_trip(y in 0.01f64..50.0, a in 0.2f64..2.0, b in -1.0f64..0.1) {
        let sf = ScaleFunction::exponential_bm(a, b * a * a).unwrap();
        let back = scale_inverse(&sf, scale_transform(&sf, y).unwrap()).unwrap();
        prop_assert!((back - y).abs() < 1e-9 * y.max(1.0));
    }
}
