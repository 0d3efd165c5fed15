//! Shape-preserving piecewise cubic Hermite interpolation.

use crate::error::{Error, Result};

/// Piecewise cubic Hermite interpolant on strictly increasing knots.
///
/// Built either from data alone (Fritsch–Carlson slopes) or from supplied
/// slopes, optionally limited so that monotone data stay monotone.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn pchip(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        check_knots(&x, &y)?;
        let d = pchip_slopes(&x, &y);
        Ok(Self { x, y, d })
    }

    /// Hermite interpolant with the given slopes, clamped by the
    /// Fritsch–Carlson conditions on every interval.
    pub fn with_slopes(x: Vec<f64>, y: Vec<f64>, mut d: Vec<f64>) -> Result<Self> {
        check_knots(&x, &y)?;
        if d.len() != x.len() {
            return Err(Error::Construction("slope count does not match knots".into()));
        }
        limit_slopes(&x, &y, &mut d);
        Ok(Self { x, y, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    /// Evaluates with constant extrapolation outside the knots.
    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if t <= lo {
            return self.y[0];
        }
        if t >= hi {
            return *self.y.last().unwrap();
        }
        let i = self.interval(t);
        hermite(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.d[i], self.d[i + 1], t).0
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (lo, hi) = self.domain();
        if t < lo || t > hi {
            return 0.0;
        }
        let i = self.interval(t);
        hermite(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.d[i], self.d[i + 1], t).1
    }

    /// Solves `eval(t) = v` for monotone data (either direction) by bisection.
    pub fn inverse(&self, v: f64) -> f64 {
        let n = self.y.len();
        let increasing = self.y[n - 1] >= self.y[0];
        let (first, last) = (self.y[0], self.y[n - 1]);
        if (increasing && v <= first) || (!increasing && v >= first) {
            return self.x[0];
        }
        if (increasing && v >= last) || (!increasing && v <= last) {
            return self.x[n - 1];
        }
        let k = if increasing {
            self.y.partition_point(|&w| w <= v)
        } else {
            self.y.partition_point(|&w| w >= v)
        };
        let i = k.clamp(1, n - 1) - 1;
        let (mut a, mut b) = (self.x[i], self.x[i + 1]);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let below = self.eval(m) < v;
            if below == increasing {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }
}

fn check_knots(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() < 2 || x.len() != y.len() {
        return Err(Error::Construction("need at least two knots with matching values".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Construction("knots must be strictly increasing".into()));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Construction("non-finite table value".into()));
    }
    Ok(())
}

/// Cubic Hermite basis on [x0, x1]; returns value and derivative at `t`.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> (f64, f64) {
    let h = x1 - x0;
    let s = (t - x0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let dv = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (v, dv)
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    if n == 2 {
        return vec![delta[0]; 2];
    }
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            d[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

fn limit_slopes(x: &[f64], y: &[f64], d: &mut [f64]) {
    for i in 0..x.len() - 1 {
        let delta = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        if delta == 0.0 {
            d[i] = 0.0;
            d[i + 1] = 0.0;
            continue;
        }
        for j in [i, i + 1] {
            if d[j] * delta < 0.0 {
                d[j] = 0.0;
            }
        }
        let a = d[i] / delta;
        let b = d[i + 1] / delta;
        let s = a * a + b * b;
        if s > 9.0 {
            let tau = 3.0 / s.sqrt();
            d[i] = tau * a * delta;
            d[i + 1] = tau * b * delta;
        }
    }
}
