//! Equilibrium laws, the joint law of stopped value and maximum, and the
//! maps describing the past-regret support.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::PowerLaw;
use crate::error::{domain, Error, Result};
use crate::interp::MonotoneCubic;
use crate::model::{ContestSpec, RegretMode};
use crate::past_regret::{PastRegretSolution, SolverConfig};
use crate::quad;

/// A one-dimensional law on `[0, support_end]` with enough structure for
/// payoff quadrature and embedding.
pub trait Marginal: Send + Sync {
    fn cdf(&self, x: f64) -> f64;
    fn density(&self, x: f64) -> f64;
    fn quantile(&self, p: f64) -> f64;
    /// `∫_[0,x] y G(dy)`.
    fn partial_mean(&self, x: f64) -> f64;
    fn support_end(&self) -> f64;
    /// Points where the density may jump.
    fn kinks(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// Mean computed as `∫_0^b (1 - G)` by adaptive quadrature, independent of
/// any closed form.
pub fn mean_by_quadrature(law: &dyn Marginal) -> f64 {
    let b = law.support_end();
    let mut cuts = vec![0.0];
    cuts.extend(law.kinks().into_iter().filter(|&k| k > 0.0 && k < b));
    cuts.push(b);
    cuts.windows(2).map(|w| quad::adaptive(|x| 1.0 - law.cdf(x), w[0], w[1], 1e-14, 1e-13)).sum()
}

/// Inverts a nondecreasing CDF by bisection.
pub fn bisect_quantile(cdf: impl Fn(f64) -> f64, p: f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if cdf(m) < p {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// CDF read from a table, interpolated shape-preservingly.
#[derive(Debug, Clone)]
pub struct TabulatedCdf {
    table: MonotoneCubic,
    kinks: Vec<f64>,
}

impl TabulatedCdf {
    pub fn new(x: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Construction("table needs at least two rows".into()));
        }
        if x[0] != 0.0 || g[0].abs() > 1e-12 {
            return Err(Error::Validation("table must start at (0, 0)".into()));
        }
        if (g.last().unwrap() - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("table must end at G = 1, got {}", g.last().unwrap())));
        }
        if let Some(w) = g.windows(2).find(|w| w[1] < w[0]) {
            return Err(Error::Validation(format!("CDF decreases from {} to {}", w[0], w[1])));
        }
        Ok(Self { table: MonotoneCubic::pchip(x, g)?, kinks: Vec::new() })
    }

    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }
}

impl Marginal for TabulatedCdf {
    fn cdf(&self, x: f64) -> f64 {
        self.table.eval(x).clamp(0.0, 1.0)
    }

    fn density(&self, x: f64) -> f64 {
        let (lo, hi) = self.table.domain();
        if x < lo || x > hi {
            return 0.0;
        }
        self.table.derivative(x).max(0.0)
    }

    fn quantile(&self, p: f64) -> f64 {
        let (lo, hi) = self.table.domain();
        bisect_quantile(|x| self.cdf(x), p, lo, hi)
    }

    fn partial_mean(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.support_end());
        // Integration by parts: ∫ y dG = x G(x) - ∫_0^x G.
        let knots = self.table.knots();
        let mut acc = 0.0;
        let rule = quad::GaussLegendre::new(4);
        for w in knots.windows(2) {
            if w[0] >= x {
                break;
            }
            acc += rule.integrate(w[0], w[1].min(x), |t| self.table.eval(t));
        }
        x * self.cdf(x) - acc
    }

    fn support_end(&self) -> f64 {
        self.table.domain().1
    }

    fn kinks(&self) -> Vec<f64> {
        self.kinks.clone()
    }
}

/// Law of `c X` for `X` with law `inner`.
#[derive(Clone)]
pub struct ScaledLaw {
    inner: Arc<dyn Marginal>,
    c: f64,
}

impl ScaledLaw {
    pub fn new(inner: Arc<dyn Marginal>, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {c}")));
        }
        Ok(Self { inner, c })
    }
}

impl Marginal for ScaledLaw {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x / self.c)
    }

    fn density(&self, x: f64) -> f64 {
        self.inner.density(x / self.c) / self.c
    }

    fn quantile(&self, p: f64) -> f64 {
        self.c * self.inner.quantile(p)
    }

    fn partial_mean(&self, x: f64) -> f64 {
        self.c * self.inner.partial_mean(x / self.c)
    }

    fn support_end(&self) -> f64 {
        self.c * self.inner.support_end()
    }

    fn kinks(&self) -> Vec<f64> {
        self.inner.kinks().into_iter().map(|k| k * self.c).collect()
    }
}

/// Marginal law of the stopped value in a symmetric equilibrium.
#[derive(Debug, Clone)]
pub enum EquilibriumCdf {
    PowerLaw(PowerLaw),
    PastRegret(Arc<PastRegretSolution>),
    Tabulated(Arc<TabulatedCdf>),
}

impl EquilibriumCdf {
    pub fn eval(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Mean; exact for the power law, by quadrature otherwise.
    pub fn mean(&self) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(p) => p.mean(),
            _ => mean_by_quadrature(self),
        }
    }

    pub fn as_past(&self) -> Option<&Arc<PastRegretSolution>> {
        match self {
            EquilibriumCdf::PastRegret(s) => Some(s),
            _ => None,
        }
    }
}

impl Marginal for EquilibriumCdf {
    fn cdf(&self, x: f64) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(p) => p.eval(x),
            EquilibriumCdf::PastRegret(s) => s.cdf(x),
            EquilibriumCdf::Tabulated(t) => t.cdf(x),
        }
    }

    fn density(&self, x: f64) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(p) => p.density(x),
            EquilibriumCdf::PastRegret(s) => s.density(x),
            EquilibriumCdf::Tabulated(t) => t.density(x),
        }
    }

    fn quantile(&self, p: f64) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(l) => l.quantile(p),
            EquilibriumCdf::PastRegret(s) => s.quantile(p),
            EquilibriumCdf::Tabulated(t) => t.quantile(p),
        }
    }

    fn partial_mean(&self, x: f64) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(p) => p.partial_mean(x),
            EquilibriumCdf::PastRegret(s) => s.partial_mean(x),
            EquilibriumCdf::Tabulated(t) => t.partial_mean(x),
        }
    }

    fn support_end(&self) -> f64 {
        match self {
            EquilibriumCdf::PowerLaw(p) => p.right_endpoint(),
            EquilibriumCdf::PastRegret(s) => s.r(),
            EquilibriumCdf::Tabulated(t) => t.support_end(),
        }
    }

    fn kinks(&self) -> Vec<f64> {
        match self {
            EquilibriumCdf::PowerLaw(_) => Vec::new(),
            EquilibriumCdf::PastRegret(s) => vec![s.x0()],
            EquilibriumCdf::Tabulated(t) => t.kinks(),
        }
    }
}

/// Deterministic maximum for a law embedded with the Perkins rule:
/// `M = X` above `x0`, `M = Φ(X)` below, with `φ = Φ⁻¹` fixed by the Doob
/// constraint `E[(X - m); M ≥ m] = 0`.
#[derive(Clone)]
pub enum PerkinsMap {
    Solution(Arc<PastRegretSolution>),
    Generic { law: Arc<dyn Marginal>, x0: f64 },
}

impl std::fmt::Debug for PerkinsMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PerkinsMap::Solution(_) => f.write_str("PerkinsMap::Solution"),
            PerkinsMap::Generic { x0, .. } => write!(f, "PerkinsMap::Generic {{ x0: {x0} }}"),
        }
    }
}

impl PerkinsMap {
    pub fn generic(law: Arc<dyn Marginal>, x0: f64) -> Self {
        PerkinsMap::Generic { law, x0 }
    }

    pub fn x0(&self) -> f64 {
        match self {
            PerkinsMap::Solution(s) => s.x0(),
            PerkinsMap::Generic { x0, .. } => *x0,
        }
    }

    pub fn r(&self) -> f64 {
        match self {
            PerkinsMap::Solution(s) => s.r(),
            PerkinsMap::Generic { law, .. } => law.support_end(),
        }
    }

    /// Lower stopping boundary `φ(m)` for a running maximum `m ≥ x0`.
    pub fn phi(&self, m: f64) -> f64 {
        match self {
            PerkinsMap::Solution(s) => s.phi(m),
            PerkinsMap::Generic { law, x0 } => {
                let x0 = *x0;
                if m <= x0 {
                    return x0;
                }
                if m >= law.support_end() {
                    return 0.0;
                }
                let gm = law.cdf(m);
                let pm = law.partial_mean(m);
                let f = |p: f64| m * (1.0 + law.cdf(p) - gm) - x0 + pm - law.partial_mean(p);
                bisect_root(f, 0.0, x0)
            }
        }
    }

    /// Maximum `Φ(x)` reached before stopping at `x < x0`.
    pub fn big_phi(&self, x: f64) -> f64 {
        match self {
            PerkinsMap::Solution(s) => s.m_of_x(x),
            PerkinsMap::Generic { law, x0 } => {
                let x0 = *x0;
                if x >= x0 {
                    return x;
                }
                let r = law.support_end();
                let gx = law.cdf(x);
                let px = law.partial_mean(x);
                let f = |m: f64| m * (1.0 + gx - law.cdf(m)) - x0 + law.partial_mean(m) - px;
                bisect_root(f, x0, r)
            }
        }
    }

    /// Maximum paired with the stopped value `x`.
    pub fn m_of_x(&self, x: f64) -> f64 {
        if x >= self.x0() {
            x
        } else {
            self.big_phi(x)
        }
    }
}

/// Root of an increasing function on `[a, b]` by bisection.
pub fn bisect_root(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (a, b);
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    let tol = 1e-15 * (b - a).abs();
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi || hi - lo <= tol {
            break;
        }
        if f(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Conditional law of the relevant maximum given the stopped value.
#[derive(Debug, Clone)]
pub enum MConditional {
    /// Penalty-free: the maximum never enters the payoff.
    Ignored,
    /// `P(M ≥ y | X = z) = z / y` for `y ≥ z`.
    FutureHitting,
    /// Running maximum tied to the stopped value by a Perkins map.
    Past(PerkinsMap),
    /// Whole-path maximum; its law is not fixed by the marginal, only its
    /// contribution to the payoff is.
    PathMaximum,
}

/// Law of the pair (stopped value, relevant maximum).
#[derive(Clone)]
pub struct JointLaw {
    marginal: Arc<dyn Marginal>,
    mode: RegretMode,
    conditional: MConditional,
}

impl std::fmt::Debug for JointLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JointLaw").field("mode", &self.mode).field("conditional", &self.conditional).finish()
    }
}

impl JointLaw {
    pub fn new(marginal: Arc<dyn Marginal>, mode: RegretMode, conditional: MConditional) -> Self {
        Self { marginal, mode, conditional }
    }

    /// Law of a player embedding `marginal` in the given mode; past-mode
    /// maxima follow the Perkins construction.
    pub fn for_marginal(marginal: Arc<dyn Marginal>, mode: RegretMode, x0: f64) -> Self {
        let conditional = match mode {
            RegretMode::NoRegret => MConditional::Ignored,
            RegretMode::FutureRegret => MConditional::FutureHitting,
            RegretMode::AllRegret => MConditional::PathMaximum,
            RegretMode::PastRegret => MConditional::Past(PerkinsMap::generic(marginal.clone(), x0)),
        };
        Self { marginal, mode, conditional }
    }

    pub fn marginal(&self) -> &dyn Marginal {
        self.marginal.as_ref()
    }

    pub fn marginal_arc(&self) -> Arc<dyn Marginal> {
        self.marginal.clone()
    }

    pub fn mode(&self) -> RegretMode {
        self.mode
    }

    pub fn conditional(&self) -> &MConditional {
        &self.conditional
    }

    /// Whether `(x, m)` lies on the support of a past-mode law within `eps`.
    pub fn on_support(&self, x: f64, m: f64, eps: f64) -> bool {
        match &self.conditional {
            MConditional::Past(map) => (m - x).abs() <= eps || (x - map.phi(m)).abs() <= eps,
            _ => m + eps >= x,
        }
    }

    /// `ν([0, x] × [0, y])` for the future-regret kernel.
    pub fn future_joint_cdf(&self, x: f64, y: f64) -> Result<f64> {
        if !matches!(self.conditional, MConditional::FutureHitting) {
            return Err(Error::Validation("joint CDF formula applies to the future-regret kernel".into()));
        }
        if y <= 0.0 {
            return Ok(0.0);
        }
        let c = x.min(y).max(0.0);
        Ok(self.marginal.cdf(c) - self.marginal.partial_mean(c) / y)
    }
}

/// Draws `count` pairs `(x, m)`; `x` by inverse transform, `m` from the
/// mode's conditional law.
pub fn sample_joint(law: &JointLaw, count: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least one".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let p: f64 = rng.random();
        let x = law.marginal.quantile(p);
        let m = match &law.conditional {
            MConditional::Ignored => x,
            MConditional::FutureHitting => {
                let u: f64 = 1.0 - rng.random::<f64>();
                x / u
            }
            MConditional::Past(map) => map.m_of_x(x),
            MConditional::PathMaximum => {
                return Err(Error::Validation(
                    "the whole-path maximum is not determined by the marginal law".into(),
                ))
            }
        };
        out.push((x, m));
    }
    Ok(out)
}

/// `P(ξ ≥ s) = exp(-∫_(x0,s) G(du) / (1 - G(u) + G(φ(u))))`.
pub fn perkins_xi_survival(g: &dyn Marginal, map: &PerkinsMap, s: f64) -> Result<f64> {
    let x0 = map.x0();
    if !(s >= x0) {
        return Err(domain("s", s));
    }
    let r = g.support_end();
    if s >= r {
        return Ok(0.0);
    }
    let integral = xi_hazard(g, map, x0, s);
    Ok((-integral).exp())
}

/// `∫_a^b g(u) / (1 - G(u) + G(φ(u))) du`.
pub fn xi_hazard(g: &dyn Marginal, map: &PerkinsMap, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    quad::adaptive(
        |u| {
            let den = 1.0 - g.cdf(u) + g.cdf(map.phi(u));
            if den <= 0.0 {
                0.0
            } else {
                g.density(u) / den
            }
        },
        a,
        b,
        1e-12,
        1e-10,
    )
}

/// A solved symmetric equilibrium.
#[derive(Debug, Clone)]
pub struct Equilibrium {
    pub spec: ContestSpec,
    pub cdf: EquilibriumCdf,
    pub joint: JointLaw,
}

impl Equilibrium {
    pub fn solve(spec: &ContestSpec, config: &SolverConfig) -> Result<Self> {
        spec.validate()?;
        let cdf = match spec.mode {
            RegretMode::NoRegret => crate::closed_form::no_regret_cdf(spec)?,
            RegretMode::FutureRegret => crate::closed_form::future_regret_cdf(spec)?,
            RegretMode::AllRegret => crate::closed_form::all_regret_cdf(spec)?,
            RegretMode::PastRegret if spec.k == 0.0 => {
                EquilibriumCdf::PowerLaw(PowerLaw::new(spec.n as f64, spec.x0)?)
            }
            RegretMode::PastRegret => {
                EquilibriumCdf::PastRegret(Arc::new(PastRegretSolution::solve(spec, config)?))
            }
        };
        let marginal: Arc<dyn Marginal> = Arc::new(cdf.clone());
        let joint = match &cdf {
            EquilibriumCdf::PastRegret(s) => {
                JointLaw::new(marginal, spec.mode, MConditional::Past(PerkinsMap::Solution(s.clone())))
            }
            _ => JointLaw::for_marginal(marginal, spec.mode, spec.x0),
        };
        Ok(Self { spec: *spec, cdf, joint })
    }

    pub fn right_endpoint(&self) -> f64 {
        self.cdf.support_end()
    }

    /// Relevant maximum paired with stopped value `x`; `None` outside past mode.
    pub fn m_of_x(&self, x: f64) -> Option<f64> {
        match self.joint.conditional() {
            MConditional::Past(map) => Some(map.m_of_x(x)),
            _ => None,
        }
    }
}
