//! Lagrangian certificates, best-response checks against a family of
//! feasible deviations, and residual checks of the past-regret system.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, Continuous};
use statrs::function::beta::beta_reg;

use crate::closed_form::PowerLaw;
use crate::error::{domain, Error, Result};
use crate::law::{bisect_quantile, mean_by_quadrature, Equilibrium, EquilibriumCdf, JointLaw, Marginal, ScaledLaw};
use crate::model::{expected_payoff, hitting_tail, ContestSpec, RegretMode};
use crate::past_regret::{two_player_oracle, PastRegretSolution, SolverConfig};

pub const MAX_VIOLATION_TOL: f64 = 1e-8;
pub const ACTIVE_SET_TOL: f64 = 1e-6;
pub const FEASIBILITY_TOL: f64 = 1e-6;

/// A candidate symmetric law, possibly deliberately wrong.
#[derive(Debug, Clone)]
pub enum Candidate {
    PowerLaw(PowerLaw),
    /// Past-regret solution stretched by `scale` about the origin.
    Past { solution: Arc<PastRegretSolution>, scale: f64 },
}

impl Candidate {
    pub fn from_equilibrium(eq: &Equilibrium) -> Result<Self> {
        match &eq.cdf {
            EquilibriumCdf::PowerLaw(p) => Ok(Candidate::PowerLaw(*p)),
            EquilibriumCdf::PastRegret(s) => Ok(Candidate::Past { solution: s.clone(), scale: 1.0 }),
            EquilibriumCdf::Tabulated(_) => {
                Err(Error::Validation("tabulated laws are checked against a fresh solve, not certified".into()))
            }
        }
    }

    /// Past-regret law solved for penalty `k_c` instead of the game's.
    pub fn past_with_penalty(spec: &ContestSpec, k_c: f64, config: &SolverConfig) -> Result<Self> {
        let other = ContestSpec::new(spec.n, spec.x0, k_c, RegretMode::PastRegret)?;
        Ok(Candidate::Past { solution: Arc::new(PastRegretSolution::solve(&other, config)?), scale: 1.0 })
    }

    /// The same shape with its support stretched by the factor `c`.
    pub fn stretched(&self, c: f64) -> Result<Self> {
        match self {
            Candidate::PowerLaw(p) => Ok(Candidate::PowerLaw(PowerLaw::new(p.effective_n(), p.x0() * c)?)),
            Candidate::Past { solution, scale } => Ok(Candidate::Past { solution: solution.clone(), scale: scale * c }),
        }
    }

    pub fn marginal(&self) -> Arc<dyn Marginal> {
        match self {
            Candidate::PowerLaw(p) => Arc::new(EquilibriumCdf::PowerLaw(*p)),
            Candidate::Past { solution, scale } => Arc::new(
                ScaledLaw::new(Arc::new(EquilibriumCdf::PastRegret(solution.clone())), *scale)
                    .expect("positive scale"),
            ),
        }
    }

    pub fn right_endpoint(&self) -> f64 {
        match self {
            Candidate::PowerLaw(p) => p.right_endpoint(),
            Candidate::Past { solution, scale } => solution.r() * scale,
        }
    }

    fn past_parts(&self) -> Option<(&PastRegretSolution, f64)> {
        match self {
            Candidate::Past { solution, scale } => Some((solution.as_ref(), *scale)),
            _ => None,
        }
    }
}

fn past_psi(sol: &PastRegretSolution, c: f64, y: f64) -> f64 {
    sol.psi(y / c)
}

fn past_psi_prime(sol: &PastRegretSolution, c: f64, y: f64) -> f64 {
    sol.psi_prime(y / c) / c
}

fn past_phi(sol: &PastRegretSolution, c: f64, y: f64) -> f64 {
    c * sol.phi(y / c)
}

/// Multipliers `(λ*, γ*)` of the certificate for this game and candidate.
pub fn multipliers(spec: &ContestSpec, cand: &Candidate) -> (f64, f64) {
    match (spec.mode, cand.past_parts()) {
        (RegretMode::PastRegret, Some((sol, c))) => {
            let (lambda, _) = sol.multipliers();
            let lambda = lambda / c;
            (lambda, past_psi(sol, c, spec.x0) - spec.x0 * lambda)
        }
        _ => {
            let n_eff = spec.effective_n();
            (1.0 / (n_eff * spec.x0), 0.0)
        }
    }
}

/// Lagrangian integrand. Outside past mode `y` is ignored and the value is
/// `(1+K) F(x)^(n-1) - K x ∫_x^∞ F^(n-1)/y² dy - λ x - γ`. In past mode it
/// is the reduced form in `ψ`, which needs `y ≥ max(x, x0)`.
pub fn lagrangian_integrand(spec: &ContestSpec, cand: &Candidate, x: f64, y: Option<f64>) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x));
    }
    let k = spec.effective_k();
    match (spec.mode, cand.past_parts()) {
        (RegretMode::PastRegret, Some((sol, c))) => {
            let y = y.ok_or_else(|| Error::InvalidParameter("past mode needs a maximum y".into()))?;
            if y < x.max(spec.x0) {
                return Err(domain("y", y));
            }
            Ok(past_integrand(sol, c, k, x, past_psi(sol, c, x), y))
        }
        (RegretMode::PastRegret, None) if k > 0.0 => {
            Err(Error::Validation("a power law cannot be a past-regret candidate when K > 0".into()))
        }
        _ => {
            let f = cand.marginal();
            let (lambda, gamma) = multipliers(spec, cand);
            let own = f.cdf(x).powi(spec.n as i32 - 1);
            let tail = if spec.mode == RegretMode::FutureRegret && k > 0.0 {
                hitting_tail(f.as_ref(), spec.n, x)
            } else {
                0.0
            };
            let kk = if spec.mode == RegretMode::FutureRegret { k } else { 0.0 };
            Ok((1.0 + kk) * own - kk * tail - lambda * x - gamma)
        }
    }
}

fn past_integrand(sol: &PastRegretSolution, c: f64, k: f64, x: f64, psi_x: f64, y: f64) -> f64 {
    let r = sol.r() * c;
    if y <= r {
        (1.0 + k) * (psi_x - past_psi(sol, c, y)) + (y - x) * past_psi_prime(sol, c, y)
    } else {
        (1.0 + k) * (psi_x - x / r)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    /// Grids extend to this multiple of the right endpoint.
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { nx: 4000, ny: 400, extent: 3.0 }
    }
}

/// `count` points on `[0, extent·r]`: half on `[0, r]` clustered at both
/// ends, an eighth log-spaced toward 0, an eighth toward `r`, the rest
/// beyond `r`.
pub fn certification_grid(r: f64, extent: f64, count: usize) -> Vec<f64> {
    let count = count.max(16);
    let main = count / 2;
    let edge = count / 8;
    let tail = count - main - 2 * edge;
    let mut pts = Vec::with_capacity(count);
    for i in 0..main {
        let t = i as f64 / (main - 1) as f64;
        pts.push(r * 0.5 * (1.0 - (std::f64::consts::PI * t).cos()));
    }
    for i in 0..edge {
        let e = -10.0 + 8.0 * i as f64 / (edge - 1) as f64;
        pts.push(r * 10f64.powf(e));
        pts.push(r * (1.0 - 10f64.powf(e)));
    }
    for i in 1..=tail {
        pts.push(r + (extent - 1.0) * r * i as f64 / tail as f64);
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LagrangianCertificate {
    pub mode: RegretMode,
    pub n: u32,
    pub x0: f64,
    pub k: f64,
    pub lambda: f64,
    pub gamma: f64,
    /// Samples `(y, η*(y))` of the multiplier function; past mode only.
    pub eta: Option<Vec<(f64, f64)>>,
    pub grid_x: usize,
    pub grid_y: usize,
    pub max_violation: f64,
    pub worst_point: Point,
    pub active_set_residual: f64,
    pub mean_residual: f64,
    pub doob_residual: Option<f64>,
    /// `λ* x0 + γ*`, the value of the Lagrangian at the candidate.
    pub value: f64,
    pub pass: bool,
}

impl LagrangianCertificate {
    pub fn into_result(self) -> Result<Self> {
        if self.pass {
            return Ok(self);
        }
        let reason = if self.max_violation > MAX_VIOLATION_TOL {
            format!("Lagrangian positive ({:.3e})", self.max_violation)
        } else if self.active_set_residual > ACTIVE_SET_TOL {
            format!("active-set residual {:.3e}", self.active_set_residual)
        } else if self.mean_residual > FEASIBILITY_TOL {
            format!("mean off by {:.3e}", self.mean_residual)
        } else {
            format!("Doob residual {:.3e}", self.doob_residual.unwrap_or(f64::NAN))
        };
        Err(Error::CertificationFailed { reason, x: self.worst_point.x, y: self.worst_point.y })
    }
}

/// Evaluates the Lagrangian on the certification grid and checks
/// feasibility of the candidate.
pub fn certify(spec: &ContestSpec, cand: &Candidate, grid: &GridSpec) -> Result<LagrangianCertificate> {
    spec.validate()?;
    let marginal = cand.marginal();
    let r = cand.right_endpoint();
    let (lambda, gamma) = multipliers(spec, cand);
    let k = spec.effective_k();
    let xs = certification_grid(r, grid.extent, grid.nx);
    let mean_residual = (mean_by_quadrature(marginal.as_ref()) - spec.x0).abs();

    let mut cert = LagrangianCertificate {
        mode: spec.mode,
        n: spec.n,
        x0: spec.x0,
        k: spec.k,
        lambda,
        gamma,
        eta: None,
        grid_x: xs.len(),
        grid_y: 1,
        max_violation: f64::NEG_INFINITY,
        worst_point: Point { x: f64::NAN, y: f64::NAN },
        active_set_residual: 0.0,
        mean_residual,
        doob_residual: None,
        value: lambda * spec.x0 + gamma,
        pass: false,
    };

    match (spec.mode, cand.past_parts()) {
        (RegretMode::PastRegret, Some((sol, c))) => {
            let x0c = sol.x0() * c;
            let ys_inner: Vec<f64> = certification_grid(r, grid.extent, grid.ny)
                .into_iter()
                .map(|y| if y < x0c { x0c + (y / x0c) * (r - x0c) } else { y })
                .collect();
            let mut ys = ys_inner;
            ys.push(x0c);
            ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
            ys.dedup();
            let psi_x: Vec<f64> = xs.par_iter().map(|&x| past_psi(sol, c, x)).collect();
            let rows: Vec<(f64, f64, f64)> = ys
                .par_iter()
                .map(|&y| {
                    let mut best = (f64::NEG_INFINITY, f64::NAN);
                    for (i, &x) in xs.iter().enumerate() {
                        if x > y {
                            break;
                        }
                        let v = past_integrand(sol, c, k, x, psi_x[i], y);
                        if v > best.0 {
                            best = (v, x);
                        }
                    }
                    (best.0, best.1, y)
                })
                .collect();
            for (v, x, y) in rows {
                if v > cert.max_violation {
                    cert.max_violation = v;
                    cert.worst_point = Point { x, y };
                }
            }
            let active: f64 = ys
                .par_iter()
                .filter(|&&y| y >= x0c && y <= r)
                .map(|&y| {
                    let p = past_phi(sol, c, y);
                    let on_curve = past_integrand(sol, c, k, p, past_psi(sol, c, p), y).abs();
                    let diag = past_integrand(sol, c, k, y, past_psi(sol, c, y), y).abs();
                    on_curve.max(diag)
                })
                .reduce(|| 0.0, f64::max);
            cert.active_set_residual = active;
            cert.grid_y = ys.len();
            cert.eta = Some(
                ys.iter()
                    .filter(|&&y| y > x0c)
                    .map(|&y| (y, if y < r { sol.psi_second(y / c) / (c * c) } else { 0.0 }))
                    .collect(),
            );
            let doob = doob_sup(marginal.as_ref(), |z| past_phi(sol, c, z), x0c, r, 50);
            cert.doob_residual = Some(doob);
        }
        (RegretMode::PastRegret, None) if k > 0.0 => {
            return Err(Error::Validation("a power law cannot be a past-regret candidate when K > 0".into()));
        }
        _ => {
            let vals: Vec<f64> =
                xs.par_iter().map(|&x| lagrangian_integrand(spec, cand, x, None)).collect::<Result<_>>()?;
            for (&x, &v) in xs.iter().zip(&vals) {
                if v > cert.max_violation {
                    cert.max_violation = v;
                    cert.worst_point = Point { x, y: x };
                }
                if x <= r {
                    cert.active_set_residual = cert.active_set_residual.max(v.abs());
                }
            }
        }
    }
    cert.pass = cert.max_violation <= MAX_VIOLATION_TOL
        && cert.active_set_residual <= ACTIVE_SET_TOL
        && cert.mean_residual <= FEASIBILITY_TOL
        && cert.doob_residual.is_none_or(|d| d <= FEASIBILITY_TOL);
    Ok(cert)
}

/// `E[(X - z); M ≥ z]` for a law whose maximum exceeds `z` exactly when
/// `X ≥ z` or `X ≤ φ(z)`.
pub fn doob_residual(law: &dyn Marginal, phi_z: f64, z: f64) -> f64 {
    let total = law.partial_mean(law.support_end());
    let low = law.partial_mean(phi_z) - z * law.cdf(phi_z);
    let high = (total - law.partial_mean(z)) - z * (1.0 - law.cdf(z));
    low + high
}

fn doob_sup(law: &dyn Marginal, phi: impl Fn(f64) -> f64 + Sync, x0: f64, r: f64, count: usize) -> f64 {
    (0..count)
        .map(|i| {
            let z = x0 + (r - x0) * (i as f64 + 0.5) / count as f64;
            doob_residual(law, phi(z), z).abs()
        })
        .fold(0.0, f64::max)
}

/// Largest Doob residual over `count` points of `(x0, r)`.
pub fn doob_residuals(sol: &PastRegretSolution, count: usize) -> f64 {
    let law = EquilibriumCdf::PastRegret(Arc::new(sol.clone()));
    doob_sup(&law, |z| sol.phi(z), sol.x0(), sol.r(), count)
}

/// Value of the symmetric equilibrium: `1/n`, `1/N`, `ψ(x0)`, or for whole
/// path regret `(1+K)/n - K E[F(M)^(n-1)]` with `M` the all-time maximum.
pub fn equilibrium_value(eq: &Equilibrium) -> f64 {
    let spec = &eq.spec;
    let n = spec.n as f64;
    match spec.mode {
        RegretMode::NoRegret => 1.0 / n,
        RegretMode::FutureRegret => 1.0 / spec.effective_n(),
        RegretMode::PastRegret => match &eq.cdf {
            EquilibriumCdf::PastRegret(s) => s.psi_x0(),
            _ => 1.0 / n,
        },
        RegretMode::AllRegret => {
            let k = spec.k;
            (1.0 + k) / n - k * hitting_tail(&eq.cdf, spec.n, spec.x0)
        }
    }
}

/// Law of `x0 + s (X - x0)`: same mean, support contracted about `x0`.
pub struct Contraction {
    inner: Arc<dyn Marginal>,
    x0: f64,
    s: f64,
}

impl Contraction {
    pub fn new(inner: Arc<dyn Marginal>, x0: f64, s: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::InvalidParameter(format!("contraction factor must lie in (0, 1], got {s}")));
        }
        Ok(Self { inner, x0, s })
    }

    fn pre(&self, x: f64) -> f64 {
        (self.x0 + (x - self.x0) / self.s).max(0.0)
    }
}

impl Marginal for Contraction {
    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(self.pre(x))
    }

    fn density(&self, x: f64) -> f64 {
        if x < self.x0 * (1.0 - self.s) {
            return 0.0;
        }
        self.inner.density(self.pre(x)) / self.s
    }

    fn quantile(&self, p: f64) -> f64 {
        self.x0 + self.s * (self.inner.quantile(p) - self.x0)
    }

    fn partial_mean(&self, x: f64) -> f64 {
        if x < self.x0 * (1.0 - self.s) {
            return 0.0;
        }
        let t = self.pre(x);
        (1.0 - self.s) * self.x0 * self.inner.cdf(t) + self.s * self.inner.partial_mean(t)
    }

    fn support_end(&self) -> f64 {
        self.x0 + self.s * (self.inner.support_end() - self.x0)
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.inner.kinks().into_iter().map(|v| self.x0 + self.s * (v - self.x0)).collect();
        k.push(self.x0 * (1.0 - self.s));
        k
    }
}

/// `c B` with `B ~ Beta(a, b)` and `c` chosen so the mean is `x0`.
pub struct ScaledBeta {
    a: f64,
    b: f64,
    c: f64,
    dist: Beta,
}

impl ScaledBeta {
    pub fn with_mean(a: f64, b: f64, x0: f64) -> Result<Self> {
        let dist = Beta::new(a, b).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        Ok(Self { a, b, c: x0 * (a + b) / a, dist })
    }
}

impl Marginal for ScaledBeta {
    fn cdf(&self, x: f64) -> f64 {
        let t = (x / self.c).clamp(0.0, 1.0);
        beta_reg(self.a, self.b, t)
    }

    fn density(&self, x: f64) -> f64 {
        let t = x / self.c;
        if !(0.0..=1.0).contains(&t) {
            return 0.0;
        }
        self.dist.pdf(t) / self.c
    }

    fn quantile(&self, p: f64) -> f64 {
        bisect_quantile(|x| self.cdf(x), p, 0.0, self.c)
    }

    fn partial_mean(&self, x: f64) -> f64 {
        let t = (x / self.c).clamp(0.0, 1.0);
        self.c * self.a / (self.a + self.b) * beta_reg(self.a + 1.0, self.b, t)
    }

    fn support_end(&self) -> f64 {
        self.c
    }
}

/// Finite mixture of laws.
pub struct Mixture {
    parts: Vec<(f64, Arc<dyn Marginal>)>,
}

impl Mixture {
    pub fn new(parts: Vec<(f64, Arc<dyn Marginal>)>) -> Result<Self> {
        let w: f64 = parts.iter().map(|p| p.0).sum();
        if parts.iter().any(|p| !(p.0 >= 0.0)) || (w - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter("mixture weights must be nonnegative and sum to one".into()));
        }
        Ok(Self { parts })
    }
}

impl Marginal for Mixture {
    fn cdf(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, l)| w * l.cdf(x)).sum()
    }

    fn density(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, l)| w * l.density(x)).sum()
    }

    fn quantile(&self, p: f64) -> f64 {
        bisect_quantile(|x| self.cdf(x), p, 0.0, self.support_end())
    }

    fn partial_mean(&self, x: f64) -> f64 {
        self.parts.iter().map(|(w, l)| w * l.partial_mean(x)).sum()
    }

    fn support_end(&self) -> f64 {
        self.parts.iter().map(|(_, l)| l.support_end()).fold(0.0, f64::max)
    }

    fn kinks(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.parts.iter().flat_map(|(_, l)| {
            let mut v = l.kinks();
            v.push(l.support_end());
            v
        }).collect();
        k.sort_by(|a, b| a.partial_cmp(b).unwrap());
        k.dedup();
        k
    }
}

pub struct Deviation {
    pub name: String,
    pub law: Arc<dyn Marginal>,
}

/// Twenty atom-free laws with mean `x0`: eight scaled beta laws, six
/// contractions of the equilibrium about `x0` (the last is the equilibrium
/// itself), and six mixtures of the equilibrium with beta laws.
pub fn deviation_family(eq: &Equilibrium) -> Result<Vec<Deviation>> {
    let x0 = eq.spec.x0;
    let base: Arc<dyn Marginal> = Arc::new(eq.cdf.clone());
    let mut out = Vec::with_capacity(20);
    let betas = [(0.5, 0.5), (1.0, 1.0), (2.0, 2.0), (0.5, 2.0), (2.0, 0.5), (1.0, 3.0), (3.0, 1.0), (5.0, 5.0)];
    for &(a, b) in &betas {
        out.push(Deviation { name: format!("beta({a},{b})"), law: Arc::new(ScaledBeta::with_mean(a, b, x0)?) });
    }
    for s in [0.02, 0.1, 0.3, 0.5, 0.8, 1.0] {
        out.push(Deviation { name: format!("contract({s})"), law: Arc::new(Contraction::new(base.clone(), x0, s)?) });
    }
    for &(w, (a, b)) in &[(0.25, (1.0, 1.0)), (0.5, (1.0, 1.0)), (0.75, (1.0, 1.0)), (0.25, (2.0, 0.5)), (0.5, (2.0, 0.5)), (0.75, (0.5, 2.0))] {
        let other: Arc<dyn Marginal> = Arc::new(ScaledBeta::with_mean(a, b, x0)?);
        out.push(Deviation {
            name: format!("mix({w},beta({a},{b}))"),
            law: Arc::new(Mixture::new(vec![(w, base.clone()), (1.0 - w, other)])?),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub equilibrium_payoff: f64,
    pub payoffs: Vec<(String, f64)>,
    pub max_gap: f64,
}

/// Largest payoff improvement of a deviation over the equilibrium, each
/// deviation facing opponents who play the equilibrium.
pub fn best_response_gap(eq: &Equilibrium, deviations: &[Deviation]) -> Result<GapReport> {
    let spec = &eq.spec;
    let base = expected_payoff(spec, &eq.joint, &eq.cdf)?;
    let payoffs: Vec<(String, f64)> = deviations
        .par_iter()
        .map(|d| {
            let mean = d.law.partial_mean(d.law.support_end());
            if (mean - spec.x0).abs() > 1e-9 {
                return Err(Error::Validation(format!("deviation {} has mean {mean}, not {}", d.name, spec.x0)));
            }
            let joint = JointLaw::for_marginal(d.law.clone(), spec.mode, spec.x0);
            Ok((d.name.clone(), expected_payoff(spec, &joint, &eq.cdf)?))
        })
        .collect::<Result<_>>()?;
    let max_gap = payoffs.iter().map(|p| p.1 - base).fold(f64::NEG_INFINITY, f64::max);
    Ok(GapReport { equilibrium_payoff: base, payoffs, max_gap })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SystemResiduals {
    /// `φ'ψ' - (1+K)θ'`.
    pub eq1: f64,
    /// `Kψ' - (y - φ)ψ''`.
    pub eq2: f64,
    /// `(y-φ)θ'/(n-1) - [(ψ^(1/(n-1)) - 1) θ^((n-2)/(n-1)) - θ]`.
    pub eq3: f64,
    /// `ψ - K/(K+1) ψ'²/ψ''` against `J(1-ψ)^(n-1)`.
    pub theta_identity: f64,
}

fn d1(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (-f(s + 2.0 * h) + 8.0 * f(s + h) - 8.0 * f(s - h) + f(s - 2.0 * h)) / (12.0 * h)
}

fn d2(f: &dyn Fn(f64) -> f64, s: f64, h: f64) -> f64 {
    (-f(s + 2.0 * h) + 16.0 * f(s + h) - 30.0 * f(s) + 16.0 * f(s - h) - f(s - 2.0 * h)) / (12.0 * h * h)
}

/// Residuals of the boundary system at `count` equally spaced interior
/// points of `(x0, r)`. Derivatives are centered differences along the
/// solution parameter, carried to `y` by the chain rule; differencing in
/// `y` directly is ill-conditioned next to `x0`, where `ψ''` is unbounded.
pub fn system_residuals(sol: &PastRegretSolution, count: usize) -> Result<SystemResiduals> {
    let (x0, r, k) = (sol.x0(), sol.r(), sol.k());
    let nm1 = sol.n() as f64 - 1.0;
    let ss = sol.sigma_star();
    let big_y = |s: f64| sol.upper_at(s);
    let psi = |s: f64| sol.psi_at(s);
    let phi = |s: f64| sol.phi_at(s);
    let theta = |s: f64| sol.theta_at(s);
    let mut out = SystemResiduals { eq1: 0.0, eq2: 0.0, eq3: 0.0, theta_identity: 0.0 };
    for i in 0..count {
        let y = x0 + (r - x0) * (i + 1) as f64 / (count + 1) as f64;
        let s = sol.sigma_upper(y);
        let h = (1e-2 * ss).min(s / 2.5).min((ss - s) / 2.5);
        let ys = d1(&big_y, s, h);
        let yss = d2(&big_y, s, h);
        let ps = d1(&psi, s, h);
        let pss = d2(&psi, s, h);
        let psi_y = ps / ys;
        let psi_yy = (pss * ys - ps * yss) / ys.powi(3);
        let phi_y = d1(&phi, s, h) / ys;
        let theta_y = d1(&theta, s, h) / ys;
        let (p, f, t) = (psi(s), phi(s), theta(s));
        let e1 = phi_y * psi_y - (1.0 + k) * theta_y;
        let e2 = k * psi_y - (y - f) * psi_yy;
        let e3 = (y - f) / nm1 * theta_y - ((p.powf(1.0 / nm1) - 1.0) * t.powf((nm1 - 1.0) / nm1) - t);
        let via_derivatives = p - k / (k + 1.0) * psi_y * psi_y / psi_yy;
        let via_j = sol.j_of_u((1.0 - p).min(sol.u_star()))?.powi(sol.n() as i32 - 1);
        out.eq1 = out.eq1.max(e1.abs());
        out.eq2 = out.eq2.max(e2.abs());
        out.eq3 = out.eq3.max(e3.abs());
        out.theta_identity = out.theta_identity.max((via_derivatives - via_j).abs());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryChecks {
    pub psi_r: f64,
    pub psi_prime_r: f64,
    pub psi_second_r: f64,
    pub phi_x0: f64,
    pub phi_r: f64,
    pub theta_r: f64,
    /// Largest deviation from the expected boundary value.
    pub max_error: f64,
}

/// Boundary values estimated from interior samples by one-sided
/// differences and extrapolation.
pub fn boundary_checks(sol: &PastRegretSolution) -> BoundaryChecks {
    let (x0, r, k) = (sol.x0(), sol.r(), sol.k());
    let w = r - x0;
    let extrap = |f: &dyn Fn(f64) -> f64, at: f64, h: f64| 3.0 * f(at + h) - 3.0 * f(at + 2.0 * h) + f(at + 3.0 * h);
    let psi = |y: f64| sol.psi(y);
    let phi = |y: f64| sol.phi(y);
    let theta = |y: f64| sol.theta(y);
    let h1 = 1e-4 * w;
    let psi_prime_r = (3.0 * psi(r) - 4.0 * psi(r - h1) + psi(r - 2.0 * h1)) / (2.0 * h1);
    let h2 = 2e-3 * w;
    let psi_second_r = (2.0 * psi(r) - 5.0 * psi(r - h2) + 4.0 * psi(r - 2.0 * h2) - psi(r - 3.0 * h2)) / (h2 * h2);
    let he = 1e-4 * w;
    let b = BoundaryChecks {
        psi_r: extrap(&psi, r, -he),
        psi_prime_r,
        psi_second_r,
        // φ(y) - x0 behaves like -C sqrt(y - x0), so sample in t = sqrt(y - x0).
        phi_x0: extrap(&|t: f64| sol.phi(x0 + t * t), 0.0, he.sqrt() * 0.1),
        phi_r: extrap(&phi, r, -he),
        theta_r: extrap(&theta, r, -he),
        max_error: 0.0,
    };
    let errs = [
        (b.psi_r - 1.0).abs(),
        (b.psi_prime_r - (k + 1.0) / r).abs(),
        (b.psi_second_r - k * (k + 1.0) / (r * r)).abs(),
        (b.phi_x0 - x0).abs(),
        b.phi_r.abs(),
        b.theta_r.abs(),
    ];
    BoundaryChecks { max_error: errs.iter().copied().fold(0.0, f64::max), ..b }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShapeChecks {
    pub concave_below_x0: bool,
    pub convex_above_x0: bool,
    /// `max (ψ(x) - x/r)` over `(0, r)`; should not be positive.
    pub tilde_psi_max: f64,
    pub cdf_monotone: bool,
}

pub fn shape_checks(sol: &PastRegretSolution, count: usize) -> ShapeChecks {
    let (x0, r) = (sol.x0(), sol.r());
    let h = 1e-3 * x0.min(r - x0);
    let second = |y: f64| (sol.psi(y + h) - 2.0 * sol.psi(y) + sol.psi(y - h)) / (h * h);
    let mut out = ShapeChecks { concave_below_x0: true, convex_above_x0: true, tilde_psi_max: f64::NEG_INFINITY, cdf_monotone: true };
    let mut prev_g = 0.0;
    for i in 1..count {
        let t = i as f64 / count as f64;
        let below = (x0 - 2.0 * h) * t + h;
        let above = x0 + 2.0 * h + (r - x0 - 3.0 * h) * t;
        if second(below) >= 0.0 {
            out.concave_below_x0 = false;
        }
        if second(above) <= 0.0 {
            out.convex_above_x0 = false;
        }
        let x = r * t;
        out.tilde_psi_max = out.tilde_psi_max.max(sol.psi(x) - x / r);
        let g = sol.cdf(x);
        if g < prev_g {
            out.cdf_monotone = false;
        }
        prev_g = g;
    }
    out
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwoPlayerCheck {
    pub r_oracle: f64,
    pub r_relative_error: f64,
    pub max_residual: f64,
}

/// Compares a two-player solution with the closed-form endpoint and the
/// implicit relation for `y - φ(y)` at `count` interior points.
pub fn two_player_check(sol: &PastRegretSolution, count: usize) -> Result<TwoPlayerCheck> {
    if sol.n() != 2 {
        return Err(Error::InvalidParameter("the closed form applies to two players".into()));
    }
    let oracle = two_player_oracle(sol.k(), sol.x0())?;
    let (x0, r) = (sol.x0(), sol.r());
    let mut max_residual: f64 = 0.0;
    for i in 0..count {
        let y = x0 + (r - x0) * (i + 1) as f64 / (count + 1) as f64;
        max_residual = max_residual.max(oracle.residual(y, y - sol.phi(y)).abs());
    }
    Ok(TwoPlayerCheck { r_oracle: oracle.r, r_relative_error: (r - oracle.r).abs() / oracle.r, max_residual })
}
