//! Past-regret equilibrium.
//!
//! The auxiliary problem `J'(u) = (J + 1 - (1-u)^(1/(n-1))) / ((K+1) E(u))`
//! with `E(u) = 1 - u - J^(n-1)` has a vertical slope where `E` vanishes.
//! It is integrated in the parameter `σ` with `du/dσ = (K+1) E`, which
//! makes the blow-up point `u*` a regular crossing of `E = 0` and turns
//! `∫_z^1 H` into `Kσ`. The third state component accumulates
//! `Q(σ) = ∫_(1-u(σ))^1 exp(∫_w^1 H) dw`, so that
//! `Ψ(σ) = r/(K+1) (K+1 - Q(σ))` and every boundary function of the
//! equilibrium is an explicit expression of the state at `σ`.
//!
//! The lower boundary is `φ = r P` with `P(σ) = ∫_0^σ e^(Kt) d(J^(n-1))`.
//! Writing `φ` as `Ψ - r E e^(Kσ)` cancels catastrophically near `σ = 0`,
//! where `φ` is of order `σ^(2(n-1))`. Integrating by parts,
//! `P = e^(Kσ) J^(n-1) - R` with `R' = K e^(Kσ) J^(n-1)`, the fourth state
//! component. `R` is a fraction `O(Kσ)` of `P`, so `P` keeps the relative
//! accuracy of `J` at small `σ`.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::interp::hermite;
use crate::law::{EquilibriumCdf, JointLaw, MConditional, PerkinsMap};
use crate::model::{ContestSpec, RegretMode};
use crate::ode::{integrate_to_event, StepControl, Trajectory};
use crate::quad::GaussLegendre;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Width of the final bracket around the crossing, in `σ`.
    pub event_tol: f64,
    /// Approximate number of stored nodes.
    pub nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, event_tol: 1e-13, nodes: 2048 }
    }
}

/// State `[u, J, Q, P]` along `σ`.
#[derive(Debug, Clone)]
pub struct JIntegration {
    pub n: u32,
    pub k: f64,
    pub sigma: Vec<f64>,
    pub state: Vec<[f64; 4]>,
    pub rate: Vec<[f64; 4]>,
    pub sigma_star: f64,
    pub u_star: f64,
    /// Bracket around `u*` left by the event bisection.
    pub u_bracket: (f64, f64),
}

impl JIntegration {
    /// Samples `(u, J(u))` at the stored nodes.
    pub fn j_table(&self) -> Vec<(f64, f64)> {
        self.state.iter().map(|s| (s[0], s[1])).collect()
    }

    pub fn q_star(&self) -> f64 {
        self.state.last().unwrap()[2]
    }
}

fn rhs(n: u32, k: f64) -> impl Fn(f64, &[f64; 4]) -> [f64; 4] {
    let p = 1.0 / (n as f64 - 1.0);
    move |s, y| {
        let e = gap(n, y);
        let nj = y[1] + 1.0 - (1.0 - y[0]).max(0.0).powf(p);
        let grow = (k * s).exp();
        let theta = y[1].max(0.0).powi(n as i32 - 1);
        [(k + 1.0) * e, nj, (k + 1.0) * e * grow, k * grow * theta]
    }
}

/// `E = 1 - u - J^(n-1)`.
fn gap(n: u32, y: &[f64; 4]) -> f64 {
    1.0 - y[0] - y[1].max(0.0).powi(n as i32 - 1)
}

/// Integrates the auxiliary problem from `u = 0` to the crossing `E = 0`.
pub fn integrate_j(spec: &ContestSpec, config: &SolverConfig) -> Result<JIntegration> {
    spec.validate()?;
    if spec.k <= 0.0 {
        return Err(Error::InvalidParameter("K = 0 is the penalty-free problem; use the closed form".into()));
    }
    let (n, k) = (spec.n, spec.k);
    let f = rhs(n, k);
    let event = |y: &[f64; 4]| gap(n, y);
    let base = StepControl {
        rtol: config.rtol,
        atol: config.atol,
        event_tol: config.event_tol,
        h_init: 1e-4,
        ..Default::default()
    };
    let t_end = 1e4;
    let locate = integrate_to_event(&f, event, 0.0, [0.0; 4], t_end, &StepControl { event_tol: 1e-9, ..base })?;
    let rough = *locate.t.last().unwrap();
    let h_max = rough / (config.nodes.max(16) - 1) as f64;
    // Small first steps leave geometrically spaced nodes near σ = 0, where
    // the lower boundary is flat to high order.
    let ctl = StepControl { h_max, h_init: h_max.min(1e-8), ..base };
    let tr: Trajectory<4> = integrate_to_event(&f, event, 0.0, [0.0; 4], t_end, &ctl)?;

    let sigma_star = *tr.t.last().unwrap();
    let last = *tr.y.last().unwrap();
    let u_star = last[0];
    let (b_lo, b_hi) = tr.event_bracket;
    let u_hi = u_star + (b_hi - b_lo) * tr.dy.last().unwrap()[0];
    if !(u_star > 0.0 && u_star < 1.0) {
        return Err(Error::SolverFailure(format!("crossing found at u = {u_star}, outside (0, 1)")));
    }
    Ok(JIntegration {
        n,
        k,
        sigma: tr.t,
        state: tr.y,
        rate: tr.dy,
        sigma_star,
        u_star,
        u_bracket: (u_star, u_hi),
    })
}

/// `(z, Ψ(z), Ψ'(z))` samples.
pub type PsiTable = Vec<(f64, f64, f64)>;

/// Right endpoint `r = x0 (K+1) / ((K+1) - I)` and samples
/// `(z, Ψ(z), Ψ'(z))` at the stored nodes, ordered by increasing `z`.
pub fn compute_r_and_psi(j: &JIntegration, x0: f64) -> Result<(f64, PsiTable)> {
    let k1 = j.k + 1.0;
    let i = j.q_star();
    if !(i < k1) {
        return Err(Error::Inconsistency(format!("I = {i} is not below K + 1 = {k1}")));
    }
    let r = x0 * k1 / (k1 - i);
    let mut table: Vec<(f64, f64, f64)> = j
        .sigma
        .iter()
        .zip(&j.state)
        .map(|(&s, y)| (1.0 - y[0], r / k1 * (k1 - y[2]), r / k1 * (j.k * s).exp()))
        .collect();
    table.reverse();
    Ok((r, table))
}

/// Numerical past-regret equilibrium for `K > 0`.
#[derive(Debug, Clone)]
pub struct PastRegretSolution {
    spec: ContestSpec,
    j: JIntegration,
    r: f64,
    /// `φ` at the nodes (increasing).
    lower: Vec<f64>,
    /// `∫_0^{φ(σ_i)} x G(dx)` at the nodes.
    lower_pm: Vec<f64>,
    /// `∫_{x0}^{Ψ(σ_i)} y G(dy)` at the nodes.
    upper_pm: Vec<f64>,
}

impl PastRegretSolution {
    pub fn solve(spec: &ContestSpec, config: &SolverConfig) -> Result<Self> {
        if spec.mode != RegretMode::PastRegret {
            return Err(Error::InvalidParameter(format!("expected mode past, got {}", spec.mode)));
        }
        let j = integrate_j(spec, config)?;
        let (r, _) = compute_r_and_psi(&j, spec.x0)?;
        if !(r > spec.x0 && r.is_finite()) {
            return Err(Error::Inconsistency(format!("right endpoint r = {r} is not above x0")));
        }
        let mut sol = Self { spec: *spec, j, r, lower: Vec::new(), lower_pm: Vec::new(), upper_pm: Vec::new() };
        sol.lower = sol.j.sigma.iter().map(|&s| sol.phi_at(s)).collect();
        if let Some(w) = sol.lower.windows(2).find(|w| w[1] < w[0] - 1e-14) {
            return Err(Error::Construction(format!("lower boundary is not monotone near x = {}", w[0])));
        }
        let m = sol.j.sigma.len();
        let rule = GaussLegendre::new(8);
        let mut lower_pm = vec![0.0; m];
        let mut upper_pm = vec![0.0; m];
        for i in 1..m {
            let (a, b) = (sol.j.sigma[i - 1], sol.j.sigma[i]);
            lower_pm[i] = lower_pm[i - 1] + rule.integrate(a, b, |s| sol.lower_pm_density(s));
        }
        for i in (0..m - 1).rev() {
            let (a, b) = (sol.j.sigma[i], sol.j.sigma[i + 1]);
            upper_pm[i] = upper_pm[i + 1] + rule.integrate(a, b, |s| sol.upper_pm_density(s));
        }
        sol.lower_pm = lower_pm;
        sol.upper_pm = upper_pm;
        Ok(sol)
    }

    pub fn spec(&self) -> &ContestSpec {
        &self.spec
    }

    pub fn integration(&self) -> &JIntegration {
        &self.j
    }

    pub fn n(&self) -> u32 {
        self.spec.n
    }

    pub fn k(&self) -> f64 {
        self.spec.k
    }

    pub fn x0(&self) -> f64 {
        self.spec.x0
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn u_star(&self) -> f64 {
        self.j.u_star
    }

    pub fn z_star(&self) -> f64 {
        1.0 - self.j.u_star
    }

    pub fn sigma_star(&self) -> f64 {
        self.j.sigma_star
    }

    pub fn u_bracket(&self) -> (f64, f64) {
        self.j.u_bracket
    }

    pub fn integral_i(&self) -> f64 {
        self.j.q_star()
    }

    pub fn j_table(&self) -> Vec<(f64, f64)> {
        self.j.j_table()
    }

    pub fn psi_table(&self) -> Vec<(f64, f64, f64)> {
        compute_r_and_psi(&self.j, self.spec.x0).map(|(_, t)| t).unwrap_or_default()
    }

    fn interval(&self, s: f64) -> usize {
        let m = self.j.sigma.len();
        match self.j.sigma.partition_point(|&v| v <= s) {
            0 => 0,
            i if i >= m => m - 2,
            i => i - 1,
        }
    }

    /// Interpolated state at `σ`.
    pub fn state(&self, s: f64) -> [f64; 4] {
        let s = s.clamp(0.0, self.j.sigma_star);
        let i = self.interval(s);
        let (t0, t1) = (self.j.sigma[i], self.j.sigma[i + 1]);
        let (y0, y1) = (&self.j.state[i], &self.j.state[i + 1]);
        let (d0, d1) = (&self.j.rate[i], &self.j.rate[i + 1]);
        let mut out = [0.0; 4];
        for c in 0..4 {
            out[c] = hermite(t0, t1, y0[c], y1[c], d0[c], d1[c], s).0;
        }
        out
    }

    fn gap_at(&self, s: f64) -> f64 {
        gap(self.spec.n, &self.state(s)).max(0.0)
    }

    /// `Ψ(σ)`, the upper support point.
    pub fn upper_at(&self, s: f64) -> f64 {
        let k1 = self.spec.k + 1.0;
        self.r / k1 * (k1 - self.state(s)[2])
    }

    /// `φ(σ) = r P(σ)`, the lower support point.
    pub fn phi_at(&self, s: f64) -> f64 {
        let y = self.state(s);
        let p = (self.spec.k * s).exp() * y[1].max(0.0).powi(self.spec.n as i32 - 1) - y[3];
        (self.r * p).clamp(0.0, self.spec.x0)
    }

    /// `ψ(Ψ(σ)) = 1 - u(σ)`.
    pub fn psi_at(&self, s: f64) -> f64 {
        1.0 - self.state(s)[0]
    }

    /// `θ(Ψ(σ)) = J(σ)^(n-1)`.
    pub fn theta_at(&self, s: f64) -> f64 {
        self.state(s)[1].max(0.0).powi(self.spec.n as i32 - 1)
    }

    fn lower_pm_density(&self, s: f64) -> f64 {
        let y = self.state(s);
        let nj = y[1] + 1.0 - (1.0 - y[0]).powf(1.0 / (self.spec.n as f64 - 1.0));
        self.phi_at(s) * nj
    }

    fn upper_pm_density(&self, s: f64) -> f64 {
        let y = self.state(s);
        let nm1 = self.spec.n as f64 - 1.0;
        let du = (self.spec.k + 1.0) * gap(self.spec.n, &y).max(0.0);
        self.upper_at(s) * (1.0 - y[0]).powf((2.0 - self.spec.n as f64) / nm1) * du / nm1
    }

    /// Hazard of the Perkins level `ξ` per unit `σ` along `y = Ψ(σ)`:
    /// `g(y) |dy/dσ| / (1 - G(y) + G(φ(y)))`, with `G(φ(y)) = J(σ)`.
    fn xi_hazard_density(&self, s: f64) -> f64 {
        let y = self.state(s);
        let nm1 = self.spec.n as f64 - 1.0;
        let psi = 1.0 - y[0];
        let dg = (self.spec.k + 1.0) * gap(self.spec.n, &y).max(0.0) * psi.powf((2.0 - self.spec.n as f64) / nm1) / nm1;
        let den = 1.0 - psi.powf(1.0 / nm1) + y[1].max(0.0);
        if den <= 0.0 {
            0.0
        } else {
            dg / den
        }
    }

    /// Cumulative hazard of `ξ` from `x0` to the upper points `Ψ(σ_i)`,
    /// as `(levels, hazard, φ(levels))` with strictly increasing levels.
    /// The node `σ = 0` (level `r`) is left out, where the hazard diverges.
    pub fn xi_hazard_table(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let rule = GaussLegendre::new(8);
        let sig = &self.j.sigma;
        let m = sig.len();
        let (mut levels, mut hazard, mut phi) = (vec![self.spec.x0], vec![0.0], vec![self.spec.x0]);
        let mut acc = 0.0;
        // Each node interval is split so that linear interpolation of the
        // hazard stays accurate where it steepens near `r`.
        const SPLIT: usize = 4;
        for i in (1..m - 1).rev() {
            let (a, b) = (sig[i], sig[i + 1]);
            for j in (0..SPLIT).rev() {
                let lo = a + (b - a) * j as f64 / SPLIT as f64;
                let hi = a + (b - a) * (j + 1) as f64 / SPLIT as f64;
                acc += rule.integrate(lo, hi, |t| self.xi_hazard_density(t));
                let y = self.upper_at(lo);
                if y > *levels.last().unwrap() {
                    levels.push(y);
                    hazard.push(acc);
                    phi.push(self.phi_at(lo));
                } else {
                    *hazard.last_mut().unwrap() = acc;
                }
            }
        }
        (levels, hazard, phi)
    }

    /// Finds `σ` with `f(σ) = target` for `f` increasing; `nodes` holds
    /// `f` at the stored nodes.
    fn invert(&self, nodes: impl Fn(usize) -> f64, f: impl Fn(f64) -> f64, target: f64) -> f64 {
        let m = self.j.sigma.len();
        let (mut a, mut b) = (0usize, m - 1);
        if target <= nodes(0) {
            return 0.0;
        }
        if target >= nodes(m - 1) {
            return self.j.sigma_star;
        }
        while b - a > 1 {
            let c = (a + b) / 2;
            if nodes(c) <= target {
                a = c;
            } else {
                b = c;
            }
        }
        let (mut lo, mut hi) = (self.j.sigma[a], self.j.sigma[b]);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `σ` with `Ψ(σ) = y`, for `y ∈ [x0, r]`.
    pub fn sigma_upper(&self, y: f64) -> f64 {
        let k1 = self.spec.k + 1.0;
        let target = k1 * (1.0 - y / self.r);
        self.invert(|i| self.j.state[i][2], |s| self.state(s)[2], target)
    }

    /// `σ` with `φ(σ) = x`, for `x ∈ [0, x0]`.
    pub fn sigma_lower(&self, x: f64) -> f64 {
        self.invert(|i| self.lower[i], |s| self.phi_at(s), x)
    }

    fn sigma_of_u(&self, u: f64) -> f64 {
        self.invert(|i| self.j.state[i][0], |s| self.state(s)[0], u)
    }

    fn sigma_of_j(&self, jv: f64) -> f64 {
        self.invert(|i| self.j.state[i][1], |s| self.state(s)[1], jv)
    }

    /// `J(u)` on `[0, u*]`.
    pub fn j_of_u(&self, u: f64) -> Result<f64> {
        if !(0.0..=self.j.u_star).contains(&u) {
            return Err(domain("u", u));
        }
        Ok(self.state(self.sigma_of_u(u))[1])
    }

    /// `H(z) = K / ((K+1)(z - J(1-z)^(n-1)))` on `(z*, 1]`.
    pub fn compute_h(&self, z: f64) -> Result<f64> {
        if !(z > self.z_star() && z <= 1.0) {
            return Err(domain("z", z));
        }
        let k = self.spec.k;
        let s = self.sigma_of_u(1.0 - z);
        let e = 1.0 - self.state(s)[1].max(0.0).powi(self.spec.n as i32 - 1) - (1.0 - z);
        if !(e > 0.0) {
            return Err(domain("z", z));
        }
        Ok(k / ((k + 1.0) * e))
    }

    /// `Ψ(z)` on `[z*, 1]`.
    pub fn capital_psi(&self, z: f64) -> Result<f64> {
        if !(z >= self.z_star() - 1e-15 && z <= 1.0) {
            return Err(domain("z", z));
        }
        Ok(self.upper_at(self.sigma_of_u(1.0 - z)))
    }

    /// `Ψ'(z) = r/(K+1) exp(∫_z^1 H)`.
    pub fn capital_psi_prime(&self, z: f64) -> Result<f64> {
        if !(z >= self.z_star() - 1e-15 && z <= 1.0) {
            return Err(domain("z", z));
        }
        let s = self.sigma_of_u(1.0 - z);
        Ok(self.r / (self.spec.k + 1.0) * (self.spec.k * s).exp())
    }

    /// `ψ` on `[0, ∞)`, extended below `x0` by `θ ∘ φ⁻¹`.
    pub fn psi(&self, y: f64) -> f64 {
        if y <= 0.0 {
            0.0
        } else if y < self.spec.x0 {
            self.theta_at(self.sigma_lower(y))
        } else if y < self.r {
            self.psi_at(self.sigma_upper(y))
        } else {
            1.0
        }
    }

    pub fn psi_prime(&self, y: f64) -> f64 {
        let k = self.spec.k;
        if y < 0.0 || y > self.r {
            0.0
        } else if y < self.spec.x0 {
            (-k * self.sigma_lower(y)).exp() / self.r
        } else {
            (k + 1.0) * (-k * self.sigma_upper(y)).exp() / self.r
        }
    }

    /// `ψ''`; `+inf` at `x0`.
    pub fn psi_second(&self, y: f64) -> f64 {
        let k = self.spec.k;
        let r = self.r;
        if y <= 0.0 || y > self.r {
            return 0.0;
        }
        if y == self.spec.x0 {
            return f64::INFINITY;
        }
        if y < self.spec.x0 {
            let s = self.sigma_lower(y);
            let st = self.state(s);
            let n = self.spec.n;
            let nj = st[1] + 1.0 - (1.0 - st[0]).powf(1.0 / (n as f64 - 1.0));
            let den = r * r * (n as f64 - 1.0) * st[1].max(0.0).powi(n as i32 - 2) * nj;
            -k * (-2.0 * k * s).exp() / den
        } else {
            let s = self.sigma_upper(y);
            let e = self.gap_at(s);
            k * (k + 1.0) * (-2.0 * k * s).exp() / (r * r * e)
        }
    }

    pub fn phi(&self, y: f64) -> f64 {
        if y <= self.spec.x0 {
            return self.spec.x0;
        }
        if y >= self.r {
            return 0.0;
        }
        self.phi_at(self.sigma_upper(y))
    }

    /// `φ⁻¹` on `[0, x0]`.
    pub fn phi_inverse(&self, x: f64) -> f64 {
        if x >= self.spec.x0 {
            return self.spec.x0;
        }
        if x <= 0.0 {
            return self.r;
        }
        self.upper_at(self.sigma_lower(x))
    }

    pub fn theta(&self, y: f64) -> f64 {
        if y >= self.r {
            return 0.0;
        }
        self.theta_at(self.sigma_upper(y.max(self.spec.x0)))
    }

    pub fn m_of_x(&self, x: f64) -> f64 {
        if x >= self.spec.x0 {
            x
        } else {
            self.phi_inverse(x)
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= self.r {
            1.0
        } else if x < self.spec.x0 {
            self.state(self.sigma_lower(x))[1].clamp(0.0, 1.0)
        } else {
            self.psi_at(self.sigma_upper(x)).powf(1.0 / (self.spec.n as f64 - 1.0))
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        let (k, r, n) = (self.spec.k, self.r, self.spec.n);
        let nm1 = n as f64 - 1.0;
        if x < 0.0 || x > r {
            0.0
        } else if x < self.spec.x0 {
            let s = self.sigma_lower(x);
            let jv = self.state(s)[1].max(0.0);
            if n > 2 && jv == 0.0 {
                return f64::INFINITY;
            }
            (-k * s).exp() / (r * nm1 * jv.powi(n as i32 - 2))
        } else {
            let s = self.sigma_upper(x);
            let psi = self.psi_at(s);
            (k + 1.0) * (-k * s).exp() * psi.powf((2.0 - n as f64) / nm1) / (nm1 * r)
        }
    }

    /// One-sided densities `(g(x0-), g(x0+))`.
    pub fn density_jump(&self) -> (f64, f64) {
        let (k, r, n) = (self.spec.k, self.r, self.spec.n);
        let nm1 = n as f64 - 1.0;
        let s = self.j.sigma_star;
        let psi = self.z_star();
        let up = (k + 1.0) * (-k * s).exp() * psi.powf((2.0 - n as f64) / nm1) / (nm1 * r);
        let down = (-k * s).exp() / (r * nm1 * psi.powf((n as f64 - 2.0) / nm1));
        (down, up)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        if p >= 1.0 {
            return self.r;
        }
        let nm1 = self.spec.n as f64 - 1.0;
        let g_x0 = self.z_star().powf(1.0 / nm1);
        if p < g_x0 {
            self.phi_at(self.sigma_of_j(p))
        } else {
            self.upper_at(self.sigma_of_u(1.0 - p.powf(nm1)))
        }
    }

    /// `∫_[0,x] y G(dy)`, accumulated along `σ`.
    pub fn partial_mean(&self, x: f64) -> f64 {
        let rule = GaussLegendre::new(8);
        if x <= 0.0 {
            return 0.0;
        }
        let lower_total = *self.lower_pm.last().unwrap();
        if x < self.spec.x0 {
            let s = self.sigma_lower(x);
            let i = self.interval(s);
            return self.lower_pm[i] + rule.integrate(self.j.sigma[i], s, |t| self.lower_pm_density(t));
        }
        if x >= self.r {
            return lower_total + self.upper_pm[0];
        }
        let s = self.sigma_upper(x);
        let i = self.interval(s);
        lower_total + self.upper_pm[i + 1] + rule.integrate(s, self.j.sigma[i + 1], |t| self.upper_pm_density(t))
    }

    /// Equilibrium value `ψ(x0) = z*`.
    pub fn psi_x0(&self) -> f64 {
        self.z_star()
    }

    /// Multipliers `(λ*, γ*)` = `(ψ'(x0+), ψ(x0) - x0 ψ'(x0+))`.
    pub fn multipliers(&self) -> (f64, f64) {
        let k = self.spec.k;
        let lambda = (k + 1.0) * (-k * self.j.sigma_star).exp() / self.r;
        (lambda, self.z_star() - self.spec.x0 * lambda)
    }
}

/// Past-regret equilibrium laws assembled from a solution.
pub fn build_equilibrium(solution: Arc<PastRegretSolution>) -> (EquilibriumCdf, JointLaw) {
    let cdf = EquilibriumCdf::PastRegret(solution.clone());
    let joint = JointLaw::new(
        Arc::new(cdf.clone()),
        RegretMode::PastRegret,
        MConditional::Past(PerkinsMap::Solution(solution)),
    );
    (cdf, joint)
}

/// Closed-form two-player right endpoint; `2 x0` at `K = 0`.
pub fn two_player_r(k: f64, x0: f64) -> f64 {
    if k == 0.0 {
        return 2.0 * x0;
    }
    x0 * k * k / ((k + 1.0) * (k - k.ln_1p()))
}

/// Two-player oracle: `r` and the implicit relation for `φ̄(y) = y - φ(y)`.
#[derive(Debug, Clone, Copy)]
pub struct TwoPlayerOracle {
    pub k: f64,
    pub x0: f64,
    pub r: f64,
}

pub fn two_player_oracle(k: f64, x0: f64) -> Result<TwoPlayerOracle> {
    if k == 0.0 {
        return Err(Error::InvalidParameter("the two-player relation is 0/0 at K = 0; the limit is r = 2 x0".into()));
    }
    if !(k > 0.0 && x0 > 0.0) {
        return Err(Error::InvalidParameter(format!("need K > 0 and x0 > 0, got K = {k}, x0 = {x0}")));
    }
    Ok(TwoPlayerOracle { k, x0, r: two_player_r(k, x0) })
}

impl TwoPlayerOracle {
    fn c(&self) -> f64 {
        self.k - self.k.ln_1p()
    }

    /// `x0 - φ̄/K - (x0/c) ln(1 - φ̄ c / (K x0)) - y`.
    pub fn residual(&self, y: f64, phibar: f64) -> f64 {
        let c = self.c();
        self.x0 - phibar / self.k - self.x0 / c * (-phibar * c / (self.k * self.x0)).ln_1p() - y
    }

    /// `φ̄(y)` for `y ∈ [x0, r]`.
    pub fn phibar(&self, y: f64) -> f64 {
        crate::law::bisect_root(|p| self.residual(y, p), 0.0, self.r)
    }
}
