//! Dormand–Prince 5(4) integrator with step-size control and a terminal
//! event located by bisection on the step length.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Width of the bracket at which event bisection stops.
    pub event_tol: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-4,
            h_max: 0.1,
            h_min: 1e-14,
            max_steps: 1_000_000,
            event_tol: 1e-12,
        }
    }
}

/// Accepted solution points; the final point is the event location.
#[derive(Debug, Clone)]
pub struct Trajectory<const D: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; D]>,
    pub dy: Vec<[f64; D]>,
    /// Bracket `[lo, hi]` around the event time after bisection.
    pub event_bracket: (f64, f64),
}

fn rk_step<const D: usize, F>(f: &F, t: f64, y: &[f64; D], k1: &[f64; D], h: f64) -> ([f64; D], [f64; D], [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut k = [[0.0; D]; 7];
    k[0] = *k1;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..D {
                    ys[d] += h * a * kj[d];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; D];
    for s in 0..7 {
        for d in 0..D {
            y5[d] += h * B5[s] * k[s][d];
            err[d] += h * (B5[s] - B4[s]) * k[s][d];
        }
    }
    // FSAL: k[6] is f(t + h, y5).
    (y5, k[6], err)
}

/// Integrates `y' = f(t, y)` from `t0` until `event(y)` changes sign from
/// positive to non-positive. Fails if `t_end` is reached first.
pub fn integrate_to_event<const D: usize, F, E>(
    f: F,
    event: E,
    t0: f64,
    y0: [f64; D],
    t_end: f64,
    ctl: &StepControl,
) -> Result<Trajectory<D>>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
    E: Fn(&[f64; D]) -> f64,
{
    if event(&y0) <= 0.0 {
        return Err(Error::SolverFailure("event function is not positive at the initial point".into()));
    }
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = ctl.h_init.min(ctl.h_max);
    let mut traj = Trajectory { t: vec![t], y: vec![y], dy: vec![k1], event_bracket: (t, t) };

    for _ in 0..ctl.max_steps {
        if t >= t_end {
            break;
        }
        h = h.min(ctl.h_max).min(t_end - t);
        let (y_new, k_new, err) = rk_step(&f, t, &y, &k1, h);
        let mut norm = 0.0;
        for d in 0..D {
            let sc = ctl.atol + ctl.rtol * y[d].abs().max(y_new[d].abs());
            norm += (err[d] / sc).powi(2);
        }
        let norm = (norm / D as f64).sqrt();
        let finite = y_new.iter().all(|v| v.is_finite());
        if finite && norm <= 1.0 {
            if event(&y_new) <= 0.0 {
                // Bisection on the step length from the last accepted state.
                let (mut lo, mut hi) = (0.0, h);
                while hi - lo > ctl.event_tol {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (ym, _, _) = rk_step(&f, t, &y, &k1, mid);
                    if event(&ym) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let (ye, _, _) = rk_step(&f, t, &y, &k1, lo);
                let te = t + lo;
                if lo > 0.0 {
                    traj.t.push(te);
                    traj.y.push(ye);
                    traj.dy.push(f(te, &ye));
                }
                traj.event_bracket = (te, t + hi);
                return Ok(traj);
            }
            t += h;
            y = y_new;
            k1 = k_new;
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(k1);
            let fac = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            let fac = if finite { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.25 };
            h *= fac;
            if h < ctl.h_min {
                return Err(Error::SolverFailure(format!(
                    "step size underflow at t = {t}; last bracket [{t}, {}]",
                    t + h / fac
                )));
            }
        }
    }
    Err(Error::SolverFailure(format!("event not reached before t = {t}")))
}
