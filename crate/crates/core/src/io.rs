//! Solution tables (CSV with a JSON header file), sample dumps and run
//! manifests.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::{Equilibrium, Marginal};
use crate::model::{ContestSpec, RegretMode};
use crate::past_regret::SolverConfig;
use crate::simulation::PathOutcome;

/// Formats with twelve significant digits.
pub fn fmt12(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.11e}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionHeader {
    pub mode: RegretMode,
    pub n: u32,
    pub x0: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub r: f64,
    pub z_star: Option<f64>,
    pub u_star: Option<f64>,
    pub psi_x0: Option<f64>,
    pub rows: usize,
}

impl SolutionHeader {
    pub fn spec(&self) -> Result<ContestSpec> {
        ContestSpec::new(self.n, self.x0, self.k, self.mode)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionRow {
    pub x: f64,
    pub g: f64,
    pub density: f64,
    pub m_of_x: Option<f64>,
}

/// Grid of `intervals + 1` equally spaced points on `[0, r]`, with `x0`
/// added when it is not already a grid point.
pub fn solution_grid(r: f64, x0: f64, intervals: usize) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=intervals).map(|i| r * i as f64 / intervals as f64).collect();
    if x0 < r && !xs.contains(&x0) {
        xs.push(x0);
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    }
    xs
}

pub fn solution_rows(eq: &Equilibrium, intervals: usize) -> Vec<SolutionRow> {
    let r = eq.right_endpoint();
    solution_grid(r, eq.spec.x0, intervals)
        .into_iter()
        .map(|x| SolutionRow { x, g: eq.cdf.cdf(x), density: eq.cdf.density(x), m_of_x: eq.m_of_x(x) })
        .collect()
}

pub fn solution_header(eq: &Equilibrium, rows: usize) -> SolutionHeader {
    let past = eq.cdf.as_past();
    SolutionHeader {
        mode: eq.spec.mode,
        n: eq.spec.n,
        x0: eq.spec.x0,
        k: eq.spec.k,
        r: eq.right_endpoint(),
        z_star: past.map(|s| s.z_star()),
        u_star: past.map(|s| s.u_star()),
        psi_x0: past.map(|s| s.psi_x0()),
        rows,
    }
}

/// CSV with header row `x,G,g,M_of_x`; `M_of_x` is empty outside past mode.
pub fn solution_csv(rows: &[SolutionRow]) -> String {
    let mut out = String::from("x,G,g,M_of_x\n");
    for r in rows {
        let m = r.m_of_x.map(fmt12).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", fmt12(r.x), fmt12(r.g), fmt12(r.density), m);
    }
    out
}

pub fn parse_solution_csv(text: &str) -> Result<Vec<SolutionRow>> {
    let mut lines = text.lines();
    let head = lines.next().ok_or_else(|| Error::Parse("empty file".into()))?;
    if head.trim() != "x,G,g,M_of_x" {
        return Err(Error::Parse(format!("unexpected header '{head}'")));
    }
    let num = |s: &str, line: usize| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("line {line}: bad number '{s}'")))
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", i + 2)));
        }
        let m = if f[3].trim().is_empty() { None } else { Some(num(f[3], i + 2)?) };
        rows.push(SolutionRow { x: num(f[0], i + 2)?, g: num(f[1], i + 2)?, density: num(f[2], i + 2)?, m_of_x: m });
    }
    Ok(rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct FileCheck {
    pub rows: usize,
    pub max_cdf_error: f64,
    pub max_map_error: f64,
    pub r_error: f64,
    pub monotone: bool,
    pub endpoints_ok: bool,
    pub pass: bool,
}

/// Checks a stored table against a fresh solve of the parameters in its
/// header, and its own shape (starts at 0, ends at 1, nondecreasing).
pub fn check_solution(header: &SolutionHeader, rows: &[SolutionRow], config: &SolverConfig) -> Result<FileCheck> {
    let spec = header.spec()?;
    let eq = Equilibrium::solve(&spec, config)?;
    if rows.len() != header.rows {
        return Err(Error::Validation(format!("header lists {} rows, file has {}", header.rows, rows.len())));
    }
    let mut max_cdf_error: f64 = 0.0;
    let mut max_map_error: f64 = 0.0;
    for row in rows {
        max_cdf_error = max_cdf_error.max((eq.cdf.cdf(row.x) - row.g).abs());
        if let (Some(m), Some(fresh)) = (row.m_of_x, eq.m_of_x(row.x)) {
            max_map_error = max_map_error.max((m - fresh).abs());
        }
    }
    let monotone = rows.windows(2).all(|w| w[1].x > w[0].x && w[1].g >= w[0].g);
    let endpoints_ok = rows.first().is_some_and(|r| r.x == 0.0 && r.g == 0.0)
        && rows.last().is_some_and(|r| (r.g - 1.0).abs() < 1e-12);
    let r_error = (header.r - eq.right_endpoint()).abs();
    let pass = max_cdf_error <= 1e-9 && max_map_error <= 1e-9 && r_error <= 1e-9 && monotone && endpoints_ok;
    Ok(FileCheck { rows: rows.len(), max_cdf_error, max_map_error, r_error, monotone, endpoints_ok, pass })
}

/// Per-path samples as CSV, at most `cap` rows.
pub fn samples_csv(samples: &[PathOutcome], cap: usize) -> String {
    let mut out = String::from("x_tau,m_past,m_future,m_all,truncated\n");
    for s in samples.iter().take(cap) {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt12(s.x_tau),
            fmt12(s.m_past),
            fmt12(s.m_future),
            fmt12(s.m_all),
            s.truncated as u8
        );
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    pub wall_clock_seconds: f64,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
}

pub fn header_from_json(text: &str) -> Result<SolutionHeader> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
