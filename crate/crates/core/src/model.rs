//! Contest parameters, the realized payoff, the expected payoff against a
//! fixed opponent law, and scale functions for diffusion contests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::interp::MonotoneCubic;
use crate::law::{EquilibriumCdf, JointLaw, MConditional, Marginal};
use crate::quad::{self, GaussLegendre};

/// Which maximum the regret penalty is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegretMode {
    /// No penalty.
    #[serde(rename = "none")]
    NoRegret,
    /// Maximum after the stopping time.
    #[serde(rename = "future")]
    FutureRegret,
    /// Running maximum up to the stopping time.
    #[serde(rename = "past")]
    PastRegret,
    /// Maximum over the whole path until absorption.
    #[serde(rename = "all")]
    AllRegret,
}

impl RegretMode {
    pub const ALL: [RegretMode; 4] =
        [RegretMode::NoRegret, RegretMode::FutureRegret, RegretMode::PastRegret, RegretMode::AllRegret];

    pub fn as_str(self) -> &'static str {
        match self {
            RegretMode::NoRegret => "none",
            RegretMode::FutureRegret => "future",
            RegretMode::PastRegret => "past",
            RegretMode::AllRegret => "all",
        }
    }
}

impl fmt::Display for RegretMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegretMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" | "no-regret" => Ok(RegretMode::NoRegret),
            "future" | "future-regret" => Ok(RegretMode::FutureRegret),
            "past" | "past-regret" => Ok(RegretMode::PastRegret),
            "all" | "all-regret" => Ok(RegretMode::AllRegret),
            other => Err(Error::InvalidParameter(format!("unknown regret mode '{other}'"))),
        }
    }
}

/// Parameters of an n-player contest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContestSpec {
    pub n: u32,
    pub x0: f64,
    /// Penalty for losing when the relevant maximum would have won.
    pub k: f64,
    /// Penalty when the relevant maximum ties the winning value.
    pub k2: f64,
    pub mode: RegretMode,
}

impl ContestSpec {
    /// Builds a validated spec with the tie penalty set to `k / 2`.
    pub fn new(n: u32, x0: f64, k: f64, mode: RegretMode) -> Result<Self> {
        let spec = Self { n, x0, k, k2: 0.5 * k, mode };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_k2(mut self, k2: f64) -> Result<Self> {
        self.k2 = k2;
        self.validate()?;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: RegretMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("need at least two players, got n = {}", self.n)));
        }
        if !(self.x0 > 0.0 && self.x0.is_finite()) {
            return Err(Error::InvalidParameter(format!("starting value must be positive, got {}", self.x0)));
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return Err(Error::InvalidParameter(format!("penalty K must be nonnegative, got {}", self.k)));
        }
        if !(self.k2 >= 0.0 && self.k2 <= self.k) {
            return Err(Error::InvalidParameter(format!("tie penalty must lie in [0, K], got {}", self.k2)));
        }
        Ok(())
    }

    /// Penalty actually charged; zero in the penalty-free contest.
    pub fn effective_k(&self) -> f64 {
        match self.mode {
            RegretMode::NoRegret => 0.0,
            _ => self.k,
        }
    }

    pub fn effective_k2(&self) -> f64 {
        match self.mode {
            RegretMode::NoRegret => 0.0,
            _ => self.k2,
        }
    }

    /// Player count of the penalty-free contest equivalent to future regret.
    pub fn effective_n(&self) -> f64 {
        let n = self.n as f64;
        match self.mode {
            RegretMode::FutureRegret => n + self.k * (n - 1.0),
            _ => n,
        }
    }
}

/// One player's stopped value, relevant maximum, and the opponents' values.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffOutcome {
    pub own_stop: f64,
    pub own_max: f64,
    pub opponents_stop: Vec<f64>,
}

impl PayoffOutcome {
    pub fn new(own_stop: f64, own_max: f64, opponents_stop: Vec<f64>) -> Self {
        Self { own_stop, own_max, opponents_stop }
    }
}

/// Payoff of a single contest: `1/k` for a k-way tie at the top, `-K` when
/// the best opponent lies strictly between the stopped value and the
/// maximum, `-K2` when the maximum equals the best opponent, else zero.
/// Ties are exact floating-point equalities.
pub fn realized_payoff(spec: &ContestSpec, outcome: &PayoffOutcome) -> Result<f64> {
    let x = outcome.own_stop;
    let m = outcome.own_max;
    if !(x >= 0.0) {
        return Err(domain("own_stop", x));
    }
    if !(m >= 0.0) {
        return Err(domain("own_max", m));
    }
    if outcome.opponents_stop.is_empty() {
        return Err(Error::Validation("at least one opponent is required".into()));
    }
    if let Some(&bad) = outcome.opponents_stop.iter().find(|v| !(**v >= 0.0)) {
        return Err(domain("opponents_stop", bad));
    }
    let best = outcome.opponents_stop.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if x >= best {
        let ties = outcome.opponents_stop.iter().filter(|&&v| v == x).count();
        return Ok(1.0 / (1 + ties) as f64);
    }
    if best < m {
        Ok(-spec.effective_k())
    } else if best == m {
        Ok(-spec.effective_k2())
    } else {
        Ok(0.0)
    }
}

/// `E[F(x / U)^(n-1)]` for `U` uniform: the conditional expectation of
/// `F(M)^(n-1)` given a stopped value `x` when `M` is the maximum of a
/// Brownian motion absorbed at zero started from `x`.
pub fn hitting_tail(opponent: &dyn Marginal, n: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return opponent.cdf(0.0).powi(n as i32 - 1);
    }
    let b = opponent.support_end();
    if x >= b {
        return 1.0;
    }
    // Substitute t = x / y; F(x/t) = 1 for t <= x/b.
    let tb = x / b;
    let rule = GaussLegendre::standard();
    let (la, lb) = (tb.ln(), 0.0f64);
    let panels = 24usize;
    let mut acc = tb;
    for i in 0..panels {
        let a = la + (lb - la) * i as f64 / panels as f64;
        let c = la + (lb - la) * (i + 1) as f64 / panels as f64;
        acc += rule.integrate(a, c, |s| {
            let t = s.exp();
            opponent.cdf(x / t).powi(n as i32 - 1) * t
        });
    }
    acc
}

/// Expected payoff of `own_law` against opponents who all use `opponent`:
/// the double integral of `(1+K) F(x)^(n-1) - K F(y)^(n-1)` over the joint
/// law of stopped value and maximum.
pub fn expected_payoff(spec: &ContestSpec, own_law: &JointLaw, opponent: &dyn Marginal) -> Result<f64> {
    spec.validate()?;
    let own = own_law.marginal();
    let total = own.cdf(own.support_end()) - own.cdf(0.0);
    if !(own.cdf(0.0).abs() < 1e-9 && (total - 1.0).abs() < 1e-9) {
        return Err(Error::Validation(format!("joint law is not normalized (mass {total})")));
    }
    let k = spec.effective_k();
    let pow = spec.n as i32 - 1;
    let f_pow = |x: f64| opponent.cdf(x).powi(pow);
    let integrate = |h: &dyn Fn(f64) -> f64| quantile_integral(own, h);

    let value = match (k == 0.0, own_law.conditional()) {
        (true, _) | (_, MConditional::Ignored) => integrate(&|x| f_pow(x)),
        (false, MConditional::FutureHitting) => {
            integrate(&|x| (1.0 + k) * f_pow(x) - k * hitting_tail(opponent, spec.n, x))
        }
        (false, MConditional::PathMaximum) => {
            let own_part = integrate(&|x| f_pow(x));
            (1.0 + k) * own_part - k * hitting_tail(opponent, spec.n, spec.x0)
        }
        (false, MConditional::Past(map)) => integrate(&|x| {
            let m = if x >= map.x0() { x } else { map.big_phi(x) };
            (1.0 + k) * f_pow(x) - k * f_pow(m)
        }),
    };
    Ok(value)
}

/// `∫ h(x) G(dx)` written as `∫_0^1 h(Q(p)) dp`, with panels graded toward
/// both ends of [0, 1] and split at the law's kink.
pub fn quantile_integral(law: &dyn Marginal, h: &dyn Fn(f64) -> f64) -> f64 {
    let mut breaks = Vec::new();
    let kinks = law.kinks();
    let mut cuts: Vec<f64> = vec![0.0];
    for k in kinks {
        let p = law.cdf(k);
        if p > 1e-12 && p < 1.0 - 1e-12 {
            cuts.push(p);
        }
    }
    cuts.push(1.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for w in cuts.windows(2) {
        let seg = quad::graded_breaks(w[0], w[1], 40, 48);
        if breaks.last() == Some(&seg[0]) {
            breaks.extend_from_slice(&seg[1..]);
        } else {
            breaks.extend_from_slice(&seg);
        }
    }
    GaussLegendre::new(12).composite(&breaks, |p| h(law.quantile(p)))
}

/// Equilibrium expected payoff of the symmetric law against itself.
pub fn equilibrium_payoff(spec: &ContestSpec, law: &JointLaw, cdf: &EquilibriumCdf) -> Result<f64> {
    expected_payoff(spec, law, cdf)
}

/// Increasing transform taking a transient diffusion to a local martingale
/// on `[0, ∞)`.
#[derive(Debug, Clone)]
pub enum ScaleFunction {
    Identity,
    /// `dY = a Y dB + b Y dt`; `s(y) = y^κ`, `κ = 1 - 2b/a²`.
    ExponentialBm { a: f64, b: f64 },
    /// `dY = a dB + b dt` with `b < 0`; `s(y) = exp(-η y)`, `η = 2b/a²`.
    DriftingBm { a: f64, b: f64 },
    /// Tabulated strictly increasing map with `s(first knot) = 0`.
    Custom(MonotoneCubic),
}

impl ScaleFunction {
    pub fn exponential_bm(a: f64, b: f64) -> Result<Self> {
        let sf = ScaleFunction::ExponentialBm { a, b };
        sf.validate()?;
        Ok(sf)
    }

    pub fn drifting_bm(a: f64, b: f64) -> Result<Self> {
        let sf = ScaleFunction::DriftingBm { a, b };
        sf.validate()?;
        Ok(sf)
    }

    pub fn custom(y: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if s.first().copied() != Some(0.0) {
            return Err(Error::InvalidParameter("custom scale must vanish at the lower boundary".into()));
        }
        if s.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("custom scale must be strictly increasing".into()));
        }
        Ok(ScaleFunction::Custom(MonotoneCubic::pchip(y, s)?))
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScaleFunction::ExponentialBm { a, b } => {
                if a == 0.0 {
                    return Err(Error::InvalidParameter("volatility must be nonzero".into()));
                }
                let kappa = 1.0 - 2.0 * b / (a * a);
                if !(kappa > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential Brownian motion is not transient to zero (kappa = {kappa})"
                    )));
                }
                Ok(())
            }
            ScaleFunction::DriftingBm { a, b } => {
                if a == 0.0 {
                    return Err(Error::InvalidParameter("volatility must be nonzero".into()));
                }
                if !(b < 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "drifting Brownian motion needs negative drift, got b = {b}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn kappa(&self) -> Option<f64> {
        match *self {
            ScaleFunction::ExponentialBm { a, b } => Some(1.0 - 2.0 * b / (a * a)),
            _ => None,
        }
    }

    pub fn eta(&self) -> Option<f64> {
        match *self {
            ScaleFunction::DriftingBm { a, b } => Some(2.0 * b / (a * a)),
            _ => None,
        }
    }
}

pub fn scale_transform(sf: &ScaleFunction, y: f64) -> Result<f64> {
    sf.validate()?;
    match sf {
        ScaleFunction::Identity => Ok(y),
        ScaleFunction::ExponentialBm { .. } => {
            if y < 0.0 {
                return Err(domain("y", y));
            }
            Ok(y.powf(sf.kappa().unwrap()))
        }
        ScaleFunction::DriftingBm { .. } => Ok((-sf.eta().unwrap() * y).exp()),
        ScaleFunction::Custom(table) => {
            let (lo, hi) = table.domain();
            if y < lo || y > hi {
                return Err(domain("y", y));
            }
            Ok(table.eval(y))
        }
    }
}

pub fn scale_inverse(sf: &ScaleFunction, x: f64) -> Result<f64> {
    sf.validate()?;
    if x < 0.0 {
        return Err(domain("x", x));
    }
    match sf {
        ScaleFunction::Identity => Ok(x),
        ScaleFunction::ExponentialBm { .. } => Ok(x.powf(1.0 / sf.kappa().unwrap())),
        ScaleFunction::DriftingBm { .. } => {
            if x == 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            Ok(-x.ln() / sf.eta().unwrap())
        }
        ScaleFunction::Custom(table) => {
            let vals = table.values();
            if x > *vals.last().unwrap() {
                return Err(domain("x", x));
            }
            Ok(table.inverse(x))
        }
    }
}

/// Equilibrium CDF in diffusion coordinates: `G_Y(y) = G_X(s(y))`.
pub fn diffusion_cdf(sf: &ScaleFunction, law: &dyn Marginal, y: f64) -> Result<f64> {
    Ok(law.cdf(scale_transform(sf, y)?))
}
