//! Browser bindings: equilibrium curves, certificates and a small
//! simulation, each returned as a JSON string.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use regret_contest::simulation::{sample_rule, ks_statistic, PathConfig, StoppingRule};
use regret_contest::verification::{certify, equilibrium_value, Candidate, GridSpec};
use regret_contest::{ContestSpec, Equilibrium, Marginal, RegretMode, SolverConfig};

fn solve(mode: &str, n: u32, x0: f64, k: f64) -> Result<Equilibrium, String> {
    let mode: RegretMode = mode.parse().map_err(|e| format!("{e}"))?;
    let spec = ContestSpec::new(n, x0, k, mode).map_err(|e| e.to_string())?;
    Equilibrium::solve(&spec, &SolverConfig::default()).map_err(|e| e.to_string())
}

/// `points + 1` samples of G*, g* and the maximum map on `[0, r]`.
pub fn curves(mode: &str, n: u32, x0: f64, k: f64, points: usize) -> Result<Value, String> {
    if !(2..=20_000).contains(&points) {
        return Err("points must lie in 2..=20000".into());
    }
    let eq = solve(mode, n, x0, k)?;
    let r = eq.right_endpoint();
    let xs: Vec<f64> = (0..=points).map(|i| r * i as f64 / points as f64).collect();
    let past = eq.cdf.as_past();
    let density: Vec<Option<f64>> = xs
        .iter()
        .map(|&x| {
            let d = eq.cdf.density(x);
            d.is_finite().then_some(d)
        })
        .collect();
    Ok(json!({
        "mode": eq.spec.mode,
        "n": n,
        "x0": x0,
        "K": k,
        "r": r,
        "value": equilibrium_value(&eq),
        "psi_x0": past.map(|s| s.psi_x0()),
        "u_star": past.map(|s| s.u_star()),
        "density_jump": past.map(|s| s.density_jump()),
        "x": xs,
        "cdf": xs.iter().map(|&x| eq.cdf.cdf(x)).collect::<Vec<_>>(),
        "density": density,
        "m_of_x": xs.iter().map(|&x| eq.m_of_x(x)).collect::<Vec<_>>(),
    }))
}

pub fn certificate(mode: &str, n: u32, x0: f64, k: f64, nx: usize, ny: usize) -> Result<Value, String> {
    let eq = solve(mode, n, x0, k)?;
    let cand = Candidate::from_equilibrium(&eq).map_err(|e| e.to_string())?;
    let cert = certify(&eq.spec, &cand, &GridSpec { nx, ny, extent: 3.0 }).map_err(|e| e.to_string())?;
    serde_json::to_value(cert).map_err(|e| e.to_string())
}

/// Histogram of stopped values under the equilibrium stopping rule, with
/// the target density at bin centres.
#[allow(clippy::too_many_arguments)]
pub fn histogram(mode: &str, n: u32, x0: f64, k: f64, paths: u64, dt: f64, seed: u64, bins: usize) -> Result<Value, String> {
    if paths == 0 || paths > 200_000 || !(2..=400).contains(&bins) {
        return Err("paths must lie in 1..=200000 and bins in 2..=400".into());
    }
    let eq = solve(mode, n, x0, k)?;
    let rule = StoppingRule::for_equilibrium(&eq).map_err(|e| e.to_string())?;
    let cfg = PathConfig::new(x0, dt, seed).map_err(|e| e.to_string())?;
    let samples = sample_rule(&rule, &cfg, paths, 0).map_err(|e| e.to_string())?;
    let r = eq.right_endpoint();
    let width = r / bins as f64;
    let mut counts = vec![0u64; bins];
    for s in &samples {
        let b = ((s.x_tau / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.x_tau).collect();
    let centres: Vec<f64> = (0..bins).map(|i| (i as f64 + 0.5) * width).collect();
    let target: Vec<f64> = (0..bins).map(|i| (eq.cdf.cdf((i + 1) as f64 * width) - eq.cdf.cdf(i as f64 * width)) / width).collect();
    Ok(json!({
        "rule": rule.name(),
        "r": r,
        "bin_width": width,
        "centres": centres,
        "density": counts.iter().map(|&c| c as f64 / (paths as f64 * width)).collect::<Vec<_>>(),
        "target": target,
        "ks": ks_statistic(&xs, |x| eq.cdf.cdf(x)),
        "mean": xs.iter().sum::<f64>() / xs.len() as f64,
        "truncated": samples.iter().filter(|s| s.truncated).count(),
    }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = equilibriumCurves)]
pub fn equilibrium_curves(mode: &str, n: u32, x0: f64, k: f64, points: usize) -> Result<String, JsError> {
    to_js(curves(mode, n, x0, k, points))
}

#[wasm_bindgen(js_name = certifyEquilibrium)]
pub fn certify_equilibrium(mode: &str, n: u32, x0: f64, k: f64, nx: usize, ny: usize) -> Result<String, JsError> {
    to_js(certificate(mode, n, x0, k, nx, ny))
}

#[wasm_bindgen(js_name = simulateHistogram)]
#[allow(clippy::too_many_arguments)]
pub fn simulate_histogram(mode: &str, n: u32, x0: f64, k: f64, paths: u32, dt: f64, seed: u32, bins: usize) -> Result<String, JsError> {
    to_js(histogram(mode, n, x0, k, paths as u64, dt, seed as u64, bins))
}
