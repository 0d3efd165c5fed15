use std::sync::Arc;
use regret_contest::law::{Marginal, PerkinsMap};
use regret_contest::model::{ContestSpec, RegretMode};
use regret_contest::simulation::*;

use regret_contest::closed_form::PowerLaw;
use regret_contest::law::EquilibriumCdf;

fn cfg(dt: f64, seed: u64) -> PathConfig {
    PathConfig::new(1.0, dt, seed).unwrap()
}

#[test]
fn stop_immediately_returns_start() {
    let mut rng = stream_rng(1, 0, 0);
    let o = simulate_path_until(&StoppingRule::StopImmediately, &cfg(1e-3, 1), &mut rng);
    assert_eq!((o.x_tau, o.m_past), (1.0, 1.0));
    assert!(o.m_future >= 1.0);
}

#[test]
fn never_stopping_is_absorbed_or_truncated() {
    let c = PathConfig { max_steps: 200_000, ..cfg(1e-3, 2) };
    let out = sample_rule(&StoppingRule::Never, &c, 200, 0).unwrap();
    for o in &out {
        assert!(o.truncated || o.x_tau == 0.0);
        assert!(o.m_past >= 1.0);
    }
}

#[test]
fn level_pair_hits_with_martingale_odds() {
    let rule = StoppingRule::hit_level_pair(0.5, 2.0, 1.0).unwrap();
    let out = sample_rule(&rule, &cfg(1e-4, 3), 20_000, 0).unwrap();
    let up = out.iter().filter(|o| o.x_tau == 2.0).count() as f64 / out.len() as f64;
    // P(hit 2 before 0.5) = (1 - 0.5) / (2 - 0.5) = 1/3.
    let se = (1.0 / 3.0 * 2.0 / 3.0 / out.len() as f64).sqrt();
    assert!((up - 1.0 / 3.0).abs() < 4.0 * se, "{up}");
    assert!(out.iter().all(|o| o.x_tau == 0.5 || o.x_tau == 2.0));
}

#[test]
fn azema_yor_embeds_uniform() {
    let law: Arc<dyn Marginal> = Arc::new(EquilibriumCdf::PowerLaw(PowerLaw::new(2.0, 1.0).unwrap()));
    let rule = StoppingRule::azema_yor(law.clone()).unwrap();
    let out = sample_rule(&rule, &cfg(1e-4, 4), 20_000, 0).unwrap();
    let xs: Vec<f64> = out.iter().map(|o| o.x_tau).collect();
    let d = ks_statistic(&xs, |x| law.cdf(x));
    assert!(d < 0.02, "{d}");
}

#[test]
fn perkins_embeds_uniform() {
    let law: Arc<dyn Marginal> = Arc::new(EquilibriumCdf::PowerLaw(PowerLaw::new(2.0, 1.0).unwrap()));
    let map = PerkinsMap::generic(law.clone(), 1.0);
    let rule = StoppingRule::perkins(law.clone(), &map).unwrap();
    let out = sample_rule(&rule, &cfg(1e-4, 5), 20_000, 0).unwrap();
    let xs: Vec<f64> = out.iter().map(|o| o.x_tau).collect();
    let d = ks_statistic(&xs, |x| law.cdf(x));
    assert!(d < 0.02, "{d}");
}

#[test]
fn streams_are_reproducible() {
    let rule = StoppingRule::hit_level_pair(0.5, 1.5, 1.0).unwrap();
    let a = sample_rule(&rule, &cfg(1e-3, 9), 100, 0).unwrap();
    let b = sample_rule(&rule, &cfg(1e-3, 9), 100, 0).unwrap();
    assert_eq!(a, b);
    let c = sample_rule(&rule, &cfg(1e-3, 9), 100, 1).unwrap();
    assert_ne!(a, c);
}

#[test]
fn ks_of_exact_quantiles_is_small() {
    let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    assert!((ks_statistic(&xs, |x| x) - 0.0005).abs() < 1e-12);
}

#[test]
fn contest_rejects_wrong_rule_count() {
    let spec = ContestSpec::new(3, 1.0, 0.0, RegretMode::NoRegret).unwrap();
    assert!(run_contest(&spec, &[StoppingRule::StopImmediately], 10, &cfg(1e-3, 1)).is_err());
}

#[test]
fn solution_hazard_matches_direct_quadrature() {
    let spec = ContestSpec::new(3, 1.0, 1.0, RegretMode::PastRegret).unwrap();
    let sol = Arc::new(regret_contest::PastRegretSolution::solve(&spec, &Default::default()).unwrap());
    let law = EquilibriumCdf::PastRegret(sol.clone());
    let map = PerkinsMap::Solution(sol.clone());
    let table = PerkinsTable::new(&law, &map).unwrap();
    let r = sol.r();
    for w in [0.05, 0.2, 0.5, 0.8, 0.95, 0.99] {
        let s = 1.0 + w * (r - 1.0);
        let (a, b) = (table.survival(s), regret_contest::perkins_xi_survival(&law, &map, s).unwrap());
        assert!((a - b).abs() < 1e-6, "s={s}: {a} vs {b}");
        assert!((table.phi(s) - sol.phi(s)).abs() < 1e-8, "φ({s})");
    }
}
