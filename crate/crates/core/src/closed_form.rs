//! Power-law equilibria `F(x) = min{(x / (N x0))^(1/(N-1)), 1}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::EquilibriumCdf;
use crate::model::{ContestSpec, RegretMode};

/// Equilibrium of a penalty-free contest with a real player count `N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    effective_n: f64,
    x0: f64,
}

impl PowerLaw {
    pub fn new(effective_n: f64, x0: f64) -> Result<Self> {
        if !(effective_n >= 2.0 && effective_n.is_finite()) {
            return Err(Error::InvalidParameter(format!("effective player count must be >= 2, got {effective_n}")));
        }
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(Error::InvalidParameter(format!("starting value must be positive, got {x0}")));
        }
        Ok(Self { effective_n, x0 })
    }

    pub fn effective_n(&self) -> f64 {
        self.effective_n
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    /// Right endpoint `N x0`.
    pub fn right_endpoint(&self) -> f64 {
        self.effective_n * self.x0
    }

    pub fn exponent(&self) -> f64 {
        1.0 / (self.effective_n - 1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let b = self.right_endpoint();
        if x >= b {
            return 1.0;
        }
        (x / b).powf(self.exponent())
    }

    /// Density; `+inf` at zero when `N > 2`.
    pub fn density(&self, x: f64) -> f64 {
        let b = self.right_endpoint();
        if x < 0.0 || x > b {
            return 0.0;
        }
        let n = self.effective_n;
        if x == 0.0 && n > 2.0 {
            return f64::INFINITY;
        }
        (x / b).powf((2.0 - n) / (n - 1.0)) / ((n - 1.0) * b)
    }

    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        self.right_endpoint() * p.powf(self.effective_n - 1.0)
    }

    /// `∫_0^x y F(dy)`.
    pub fn partial_mean(&self, x: f64) -> f64 {
        let b = self.right_endpoint();
        let n = self.effective_n;
        let t = x.clamp(0.0, b) / b;
        b / n * t.powf(n / (n - 1.0))
    }

    pub fn mean(&self) -> f64 {
        self.partial_mean(self.right_endpoint())
    }
}

fn require_mode(spec: &ContestSpec, mode: RegretMode) -> Result<()> {
    spec.validate()?;
    if spec.mode != mode {
        return Err(Error::InvalidParameter(format!("expected mode {mode}, got {}", spec.mode)));
    }
    Ok(())
}

pub fn no_regret_cdf(spec: &ContestSpec) -> Result<EquilibriumCdf> {
    require_mode(spec, RegretMode::NoRegret)?;
    Ok(EquilibriumCdf::PowerLaw(PowerLaw::new(spec.n as f64, spec.x0)?))
}

pub fn future_regret_cdf(spec: &ContestSpec) -> Result<EquilibriumCdf> {
    require_mode(spec, RegretMode::FutureRegret)?;
    Ok(EquilibriumCdf::PowerLaw(PowerLaw::new(spec.effective_n(), spec.x0)?))
}

/// The penalty term is the same for every stopping rule, so the law is
/// the penalty-free one whatever `K` is.
pub fn all_regret_cdf(spec: &ContestSpec) -> Result<EquilibriumCdf> {
    require_mode(spec, RegretMode::AllRegret)?;
    Ok(EquilibriumCdf::PowerLaw(PowerLaw::new(spec.n as f64, spec.x0)?))
}
