//! Monte Carlo contests: Brownian paths absorbed at zero, stopped by an
//! embedding of a target law.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::law::{xi_hazard, Equilibrium, Marginal, PerkinsMap};
use crate::model::{realized_payoff, ContestSpec, PayoffOutcome, RegretMode};
use crate::past_regret::PastRegretSolution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    GaussianIncrements,
    /// Steps of `±√dt` with equal probability.
    ScaledRandomWalk,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PathConfig {
    pub x0: f64,
    pub dt: f64,
    pub max_steps: u64,
    pub seed: u64,
    pub scheme: Scheme,
    /// Brownian-bridge corrections for barrier crossings and maxima within
    /// a step.
    pub bridge: bool,
}

impl PathConfig {
    pub fn new(x0: f64, dt: f64, seed: u64) -> Result<Self> {
        let c = Self { x0, dt, max_steps: 10_000_000, seed, scheme: Scheme::GaussianIncrements, bridge: true };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {}", self.dt)));
        }
        if !(self.x0 > 0.0) {
            return Err(Error::InvalidParameter(format!("starting value must be positive, got {}", self.x0)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Azéma–Yor stopping boundary `β(M)`, the inverse of the barycenter
/// `c(p) = E[X | X ≥ Q(p)]` composed with the quantile.
#[derive(Debug, Clone)]
pub struct AzemaYorTable {
    boundary: MonotoneCubic,
    top: f64,
}

impl AzemaYorTable {
    pub fn new(law: &dyn Marginal) -> Result<Self> {
        let mean = law.partial_mean(law.support_end());
        let mut ps: Vec<f64> = (0..1500).map(|i| 0.999 * i as f64 / 1499.0).collect();
        for k in 1..=30 {
            ps.push(1.0 - 1e-3 * 0.6f64.powi(k));
        }
        let mut c = Vec::with_capacity(ps.len());
        let mut q = Vec::with_capacity(ps.len());
        for &p in &ps {
            let qp = law.quantile(p);
            let bary = (mean - law.partial_mean(qp)) / (1.0 - p);
            if c.last().is_none_or(|&l: &f64| bary > l) && q.last().is_none_or(|&l: &f64| qp >= l) {
                c.push(bary);
                q.push(qp);
            }
        }
        let top = law.support_end();
        if c.last().is_some_and(|&l| top > l) {
            c.push(top);
            q.push(top);
        }
        Ok(Self { boundary: MonotoneCubic::pchip(c, q)?, top })
    }

    pub fn beta(&self, m: f64) -> f64 {
        if m >= self.top {
            return self.top;
        }
        self.boundary.eval(m)
    }
}

/// Perkins rule `τ_ξ ∧ τ_φ`: stop when the maximum reaches an independent
/// level `ξ` or the path falls to `φ(M)`.
#[derive(Debug, Clone)]
pub struct PerkinsTable {
    levels: Vec<f64>,
    hazard: Vec<f64>,
    phi: MonotoneCubic,
    x0: f64,
    r: f64,
}

impl PerkinsTable {
    /// For `PerkinsMap::Solution` the hazard comes from the solution's own
    /// law, integrated in its parameter `σ`, and `law` is not consulted.
    pub fn new(law: &dyn Marginal, map: &PerkinsMap) -> Result<Self> {
        if let PerkinsMap::Solution(sol) = map {
            return Self::for_solution(sol);
        }
        let (x0, r) = (map.x0(), map.r());
        let mut levels: Vec<f64> = (0..=1200).map(|i| x0 + (r - x0) * 0.99 * i as f64 / 1200.0).collect();
        for k in 1..=60 {
            levels.push(r - 0.01 * (r - x0) * 0.75f64.powi(k));
        }
        let mut hazard = vec![0.0; levels.len()];
        for i in 1..levels.len() {
            hazard[i] = hazard[i - 1] + xi_hazard(law, map, levels[i - 1], levels[i]);
        }
        let mut mg: Vec<f64> = levels.clone();
        mg.push(r);
        let mut ph: Vec<f64> = mg.iter().map(|&m| map.phi(m)).collect();
        // Strictly decreasing values are not required; keep them monotone.
        for i in 1..ph.len() {
            ph[i] = ph[i].min(ph[i - 1]);
        }
        Ok(Self { levels, hazard, phi: MonotoneCubic::pchip(mg, ph)?, x0, r })
    }

    pub fn for_solution(sol: &PastRegretSolution) -> Result<Self> {
        let (levels, hazard, mut ph) = sol.xi_hazard_table();
        let mut mg = levels.clone();
        mg.push(sol.r());
        ph.push(0.0);
        for i in 1..ph.len() {
            ph[i] = ph[i].min(ph[i - 1]);
        }
        Ok(Self { levels, hazard, phi: MonotoneCubic::pchip(mg, ph)?, x0: sol.x0(), r: sol.r() })
    }

    /// Level with survival `P(ξ ≥ s) = u`.
    pub fn xi_from_uniform(&self, u: f64) -> f64 {
        let target = -u.ln();
        let i = self.hazard.partition_point(|&h| h < target);
        if i == 0 {
            return self.x0;
        }
        if i >= self.hazard.len() {
            return *self.levels.last().unwrap();
        }
        let (h0, h1) = (self.hazard[i - 1], self.hazard[i]);
        let w = if h1 > h0 { (target - h0) / (h1 - h0) } else { 0.0 };
        self.levels[i - 1] + w * (self.levels[i] - self.levels[i - 1])
    }

    pub fn survival(&self, s: f64) -> f64 {
        if s <= self.x0 {
            return 1.0;
        }
        if s >= self.r {
            return 0.0;
        }
        let i = self.levels.partition_point(|&l| l < s).min(self.levels.len() - 1);
        let (l0, l1) = (self.levels[i - 1], self.levels[i]);
        let w = (s - l0) / (l1 - l0);
        (-(self.hazard[i - 1] + w * (self.hazard[i] - self.hazard[i - 1]))).exp()
    }

    pub fn phi(&self, m: f64) -> f64 {
        self.phi.eval(m).max(0.0)
    }
}

#[derive(Clone)]
pub enum StoppingRule {
    StopImmediately,
    /// Run until absorption.
    Never,
    /// Stop at the first exit from `(a, b)`.
    HitLevelPair { a: f64, b: f64 },
    AzemaYor { table: Arc<AzemaYorTable>, target: Arc<dyn Marginal> },
    Perkins { table: Arc<PerkinsTable>, target: Arc<dyn Marginal> },
    /// No path: the stopped value is drawn from the law and the running
    /// maximum from the Perkins map when one is given.
    QuantileOracle { target: Arc<dyn Marginal>, map: Option<PerkinsMap> },
}

impl std::fmt::Debug for StoppingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl StoppingRule {
    pub fn name(&self) -> &'static str {
        match self {
            StoppingRule::StopImmediately => "stop-immediately",
            StoppingRule::Never => "never",
            StoppingRule::HitLevelPair { .. } => "hit-level-pair",
            StoppingRule::AzemaYor { .. } => "azema-yor",
            StoppingRule::Perkins { .. } => "perkins",
            StoppingRule::QuantileOracle { .. } => "quantile-oracle",
        }
    }

    pub fn hit_level_pair(a: f64, b: f64, x0: f64) -> Result<Self> {
        if !(0.0 <= a && a < x0 && x0 < b) {
            return Err(Error::InvalidParameter(format!("need 0 <= a < x0 < b, got a = {a}, b = {b}")));
        }
        Ok(StoppingRule::HitLevelPair { a, b })
    }

    pub fn azema_yor(target: Arc<dyn Marginal>) -> Result<Self> {
        Ok(StoppingRule::AzemaYor { table: Arc::new(AzemaYorTable::new(target.as_ref())?), target })
    }

    pub fn perkins(target: Arc<dyn Marginal>, map: &PerkinsMap) -> Result<Self> {
        Ok(StoppingRule::Perkins { table: Arc::new(PerkinsTable::new(target.as_ref(), map)?), target })
    }

    /// Perkins rule in past mode, Azéma–Yor otherwise.
    pub fn for_equilibrium(eq: &Equilibrium) -> Result<Self> {
        let target = eq.joint.marginal_arc();
        match eq.joint.conditional() {
            crate::law::MConditional::Past(map) => Self::perkins(target, map),
            _ => Self::azema_yor(target),
        }
    }

    pub fn target(&self) -> Option<&Arc<dyn Marginal>> {
        match self {
            StoppingRule::AzemaYor { target, .. }
            | StoppingRule::Perkins { target, .. }
            | StoppingRule::QuantileOracle { target, .. } => Some(target),
            _ => None,
        }
    }

    fn upper(&self, xi: f64) -> f64 {
        match self {
            StoppingRule::HitLevelPair { b, .. } => *b,
            StoppingRule::Perkins { .. } => xi,
            _ => f64::INFINITY,
        }
    }

    fn lower(&self, m: f64) -> f64 {
        match self {
            StoppingRule::HitLevelPair { a, .. } => *a,
            StoppingRule::AzemaYor { table, .. } => table.beta(m),
            StoppingRule::Perkins { table, .. } => table.phi(m),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathOutcome {
    pub x_tau: f64,
    pub m_past: f64,
    pub m_future: f64,
    pub m_all: f64,
    pub steps: u64,
    pub truncated: bool,
}

impl PathOutcome {
    pub fn max_for(&self, mode: RegretMode) -> f64 {
        match mode {
            RegretMode::NoRegret => self.x_tau,
            RegretMode::PastRegret => self.m_past,
            RegretMode::FutureRegret => self.m_future,
            RegretMode::AllRegret => self.m_all,
        }
    }
}

/// Random stream for one (player, path) pair.
pub fn stream_rng(seed: u64, player: usize, path: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((player as u64) << 48) ^ path);
    rng
}

fn uniform_open(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Runs one path from `x0` until the rule stops it. After the stop the
/// maximum of the continuing path is drawn exactly: a Brownian motion
/// absorbed at zero started from `x` exceeds `y ≥ x` with probability
/// `x / y`, so it is `x / U`.
pub fn simulate_path_until(rule: &StoppingRule, config: &PathConfig, rng: &mut ChaCha8Rng) -> PathOutcome {
    let x0 = config.x0;
    let finish = |x_tau: f64, m_past: f64, steps: u64, truncated: bool, rng: &mut ChaCha8Rng| {
        let m_future = if x_tau > 0.0 { x_tau / uniform_open(rng) } else { 0.0 };
        PathOutcome { x_tau, m_past, m_future, m_all: m_past.max(m_future), steps, truncated }
    };
    match rule {
        StoppingRule::StopImmediately => return finish(x0, x0, 0, false, rng),
        StoppingRule::QuantileOracle { target, map } => {
            let x = target.quantile(rng.random::<f64>());
            let m = map.as_ref().map_or(x.max(x0), |mp| mp.m_of_x(x));
            return finish(x, m, 0, false, rng);
        }
        _ => {}
    }
    let xi = match rule {
        StoppingRule::Perkins { table, .. } => table.xi_from_uniform(uniform_open(rng)),
        _ => f64::INFINITY,
    };
    let upper = rule.upper(xi);
    let dt = config.dt;
    let sd = dt.sqrt();
    let mut x = x0;
    let mut m = x0;
    let mut lower = rule.lower(m);
    if x >= upper {
        return finish(upper, upper, 0, false, rng);
    }
    if x < lower {
        return finish(lower.max(0.0), m, 0, false, rng);
    }
    let mut steps = 0u64;
    loop {
        if steps >= config.max_steps {
            return finish(x, m, steps, true, rng);
        }
        let dx = match config.scheme {
            Scheme::GaussianIncrements => sd * rng.sample::<f64, _>(StandardNormal),
            Scheme::ScaledRandomWalk => {
                if rng.random::<bool>() {
                    sd
                } else {
                    -sd
                }
            }
        };
        let xn = x + dx;
        steps += 1;
        let mut step_max = x.max(xn);
        let near_max = step_max < m && 2.0 * (m - x) * (m - xn) / dt < 30.0;
        let new_max_below_upper = step_max >= m && upper.is_finite() && step_max < upper;
        if config.bridge && xn > 0.0 && (near_max || new_max_below_upper) {
            let u = uniform_open(rng);
            let bm = 0.5 * (x + xn + ((xn - x).powi(2) - 2.0 * dt * u.ln()).sqrt());
            step_max = step_max.max(bm);
        }
        if step_max > m {
            m = step_max;
        }
        if m >= upper {
            return finish(upper, upper, steps, false, rng);
        }
        lower = rule.lower(m);
        if xn <= lower {
            return finish(lower.max(0.0), m, steps, false, rng);
        }
        if config.bridge {
            let gap = 2.0 * (x - lower) * (xn - lower) / dt;
            if gap < 30.0 && uniform_open(rng) < (-gap).exp() {
                return finish(lower.max(0.0), m, steps, false, rng);
            }
        }
        x = xn;
    }
}

/// `count` independent paths of one rule; order follows the path index.
pub fn sample_rule(rule: &StoppingRule, config: &PathConfig, count: u64, player: usize) -> Result<Vec<PathOutcome>> {
    config.validate()?;
    Ok((0..count)
        .into_par_iter()
        .map(|p| {
            let mut rng = stream_rng(config.seed, player, p);
            simulate_path_until(rule, config, &mut rng)
        })
        .collect())
}

/// Kolmogorov–Smirnov distance between a sample and a CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v: Vec<f64> = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let g = cdf(x);
            (g - i as f64 / n).max((i + 1) as f64 / n - g)
        })
        .fold(0.0, f64::max)
}

/// Mean and standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
}

impl Estimate {
    pub fn from_values(v: impl Iterator<Item = f64> + Clone) -> Self {
        let (mut s, mut s2, mut n) = (0.0, 0.0, 0.0);
        for x in v {
            s += x;
            s2 += x * x;
            n += 1.0;
        }
        let mean = s / n;
        let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
        Self { mean, se: (var / n).sqrt() }
    }

    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se.max(1e-300)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PlayerReport {
    pub rule: String,
    pub win_probability: Estimate,
    pub payoff: Estimate,
    pub stopped_mean: Estimate,
    pub ks_distance: Option<f64>,
    /// Fraction of samples off the past-mode support; Perkins rule only.
    pub off_support_rate: Option<f64>,
    pub truncated: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub spec: ContestSpec,
    pub contests: u64,
    pub config: PathConfig,
    pub players: Vec<PlayerReport>,
    pub truncated_rate: f64,
}

/// Plays `contests` independent rounds; player `i` uses `rules[i]`.
pub fn run_contest(spec: &ContestSpec, rules: &[StoppingRule], contests: u64, config: &PathConfig) -> Result<SimulationReport> {
    spec.validate()?;
    config.validate()?;
    let n = spec.n as usize;
    if rules.len() != n {
        return Err(Error::InvalidParameter(format!("need {n} rules, got {}", rules.len())));
    }
    if contests < 2 {
        return Err(Error::InvalidParameter("need at least two contests".into()));
    }
    if (config.x0 - spec.x0).abs() > 0.0 {
        return Err(Error::InvalidParameter("path start must equal the contest's x0".into()));
    }
    let rounds: Vec<Vec<PathOutcome>> = (0..contests)
        .into_par_iter()
        .map(|c| {
            (0..n)
                .map(|i| {
                    let mut rng = stream_rng(config.seed, i, c);
                    simulate_path_until(&rules[i], config, &mut rng)
                })
                .collect()
        })
        .collect();

    let mut players = Vec::with_capacity(n);
    let mut total_trunc = 0u64;
    for i in 0..n {
        let mut payoffs = Vec::with_capacity(rounds.len());
        let mut wins = Vec::with_capacity(rounds.len());
        for round in &rounds {
            let own = &round[i];
            let opponents: Vec<f64> = round.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, o)| o.x_tau).collect();
            let outcome = PayoffOutcome::new(own.x_tau, own.max_for(spec.mode).max(own.x_tau), opponents.clone());
            payoffs.push(realized_payoff(spec, &outcome)?);
            let free = spec.with_mode(RegretMode::NoRegret);
            wins.push(realized_payoff(&free, &PayoffOutcome::new(own.x_tau, own.x_tau, opponents))?);
        }
        let xs: Vec<f64> = rounds.iter().map(|r| r[i].x_tau).collect();
        let truncated = rounds.iter().filter(|r| r[i].truncated).count() as u64;
        total_trunc += truncated;
        let ks = rules[i].target().map(|t| ks_statistic(&xs, |x| t.cdf(x)));
        let off = match &rules[i] {
            StoppingRule::Perkins { table, target } => {
                let eps = 0.01 * target.support_end();
                let off = rounds
                    .iter()
                    .filter(|r| {
                        let o = &r[i];
                        (o.m_past - o.x_tau).abs() > eps && (o.x_tau - table.phi(o.m_past)).abs() > eps
                    })
                    .count();
                Some(off as f64 / rounds.len() as f64)
            }
            _ => None,
        };
        players.push(PlayerReport {
            rule: rules[i].name().to_string(),
            win_probability: Estimate::from_values(wins.iter().copied()),
            payoff: Estimate::from_values(payoffs.iter().copied()),
            stopped_mean: Estimate::from_values(xs.iter().copied()),
            ks_distance: ks,
            off_support_rate: off,
            truncated,
        });
    }
    Ok(SimulationReport {
        spec: *spec,
        contests,
        config: *config,
        players,
        truncated_rate: total_trunc as f64 / (contests as f64 * n as f64),
    })
}
