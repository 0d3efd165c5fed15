mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use regret_contest::io::{
    check_solution, header_from_json, parse_solution_csv, samples_csv, solution_csv, solution_header, solution_rows,
    to_json, RunManifest,
};
use regret_contest::simulation::{run_contest, sample_rule, PathConfig, StoppingRule};
use regret_contest::verification::{certify, Candidate, GridSpec};
use regret_contest::{ContestSpec, Equilibrium, Error, Marginal, RegretMode, SolverConfig};

#[derive(Parser)]
#[command(name = "regret-contest", version, about = "Equilibria of the Brownian stopping contest with regret")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the equilibrium law and write its table.
    Solve(SolveArgs),
    /// Certify an equilibrium, or check a stored table.
    Verify(VerifyArgs),
    /// Play simulated contests with embedded stopping rules.
    Simulate(SimulateArgs),
    /// Draw G* and g* for a list of penalties.
    Plot(PlotArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Number of players.
    #[arg(long, default_value_t = 2)]
    n: u32,
    /// Common starting point.
    #[arg(long, default_value_t = 1.0)]
    x0: f64,
    /// Output directory.
    #[arg(long, env = "REGRET_CONTEST_OUT", default_value = ".")]
    out: PathBuf,
    /// Relative tolerance of the ODE solver.
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    /// Absolute tolerance of the ODE solver.
    #[arg(long, default_value_t = 1e-14)]
    atol: f64,
}

impl Common {
    fn solver(&self) -> SolverConfig {
        SolverConfig { rtol: self.rtol, atol: self.atol, ..SolverConfig::default() }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Regret mode: none, future, past or all.
    #[arg(long, default_value = "none")]
    mode: RegretMode,
    #[command(flatten)]
    common: Common,
    /// Regret penalty; a comma-separated list solves each value.
    #[arg(long = "K", value_delimiter = ',', default_value = "0")]
    k: Vec<f64>,
    /// Number of intervals of the output grid on [0, r].
    #[arg(long, default_value_t = 1000)]
    grid: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Regret mode: none, future, past or all.
    #[arg(long, default_value = "none")]
    mode: RegretMode,
    #[command(flatten)]
    common: Common,
    /// Regret penalty.
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    /// Stored solution table to check instead of certifying a fresh solve.
    /// Its JSON header is read from the same path with extension `.json`.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Points in the x direction of the certification grid.
    #[arg(long, default_value_t = 4000)]
    nx: usize,
    /// Points in the y direction (past mode).
    #[arg(long, default_value_t = 400)]
    ny: usize,
    /// Grid extent as a multiple of the right endpoint.
    #[arg(long, default_value_t = 3.0)]
    extent: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleChoice {
    /// Perkins rule in past mode, Azéma–Yor otherwise.
    Equilibrium,
    AzemaYor,
    Perkins,
}

#[derive(Args)]
struct SimulateArgs {
    /// Regret mode: none, future, past or all.
    #[arg(long, default_value = "none")]
    mode: RegretMode,
    #[command(flatten)]
    common: Common,
    /// Regret penalty.
    #[arg(long = "K", default_value_t = 0.0)]
    k: f64,
    /// Number of contests.
    #[arg(long, default_value_t = 100_000)]
    paths: u64,
    /// Time step.
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    /// Seed of the random streams.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value = "equilibrium")]
    rule: RuleChoice,
    /// Disable the Brownian bridge correction.
    #[arg(long)]
    no_bridge: bool,
    /// Step cap per path; paths reaching it are counted as truncated.
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: u64,
    /// Fail when a player's KS distance to the target exceeds this.
    #[arg(long, default_value_t = 0.01)]
    ks_tol: f64,
    /// Also write player 0's samples as CSV, at most this many rows.
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Regret mode: none, future, past or all.
    #[arg(long, default_value = "past")]
    mode: RegretMode,
    #[command(flatten)]
    common: Common,
    /// Comma-separated penalties, one curve each.
    #[arg(long = "K", value_delimiter = ',', required = true)]
    k: Vec<f64>,
    /// Densities are clipped at this height.
    #[arg(long, default_value_t = 3.0)]
    ceiling: f64,
    /// Points per curve.
    #[arg(long, default_value_t = 600)]
    points: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) | Error::Domain { .. } => 2,
        Error::CertificationFailed { .. } | Error::Validation(_) | Error::Parse(_) => 1,
        _ => 3,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

fn write(path: &Path, text: &str, outputs: &mut Vec<String>) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| io_err(path, e))?;
    outputs.push(path.display().to_string());
    Ok(())
}

fn stem(mode: RegretMode, n: u32, x0: f64, k: f64) -> String {
    format!("{}_n{n}_x{x0}_K{k}", mode.as_str())
}

fn write_manifest(
    dir: &Path,
    name: &str,
    command: &str,
    parameters: serde_json::Value,
    seed: Option<u64>,
    outputs: Vec<String>,
    started: Instant,
) -> Result<(), Failure> {
    let manifest = RunManifest {
        command: command.into(),
        parameters,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        seed,
        outputs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let path = dir.join(format!("{name}.manifest.json"));
    fs::write(&path, to_json(&manifest)?).map_err(|e| io_err(&path, e))
}

fn spec_for(mode: RegretMode, c: &Common, k: f64) -> Result<ContestSpec, Failure> {
    Ok(ContestSpec::new(c.n, c.x0, k, mode)?)
}

fn prepare_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn cmd_solve(a: &SolveArgs) -> Result<bool, Failure> {
    let c = &a.common;
    prepare_dir(&c.out)?;
    if a.grid < 2 {
        return Err(Failure { code: 2, message: "--grid must be at least 2".into() });
    }
    for &k in &a.k {
        let started = Instant::now();
        let spec = spec_for(a.mode, c, k)?;
        let eq = Equilibrium::solve(&spec, &c.solver())?;
        let rows = solution_rows(&eq, a.grid);
        let header = solution_header(&eq, rows.len());
        let name = stem(spec.mode, spec.n, spec.x0, k);
        let mut outputs = Vec::new();
        write(&c.out.join(format!("{name}.csv")), &solution_csv(&rows), &mut outputs)?;
        write(&c.out.join(format!("{name}.json")), &to_json(&header)?, &mut outputs)?;
        let params = json!({"mode": spec.mode, "n": spec.n, "x0": spec.x0, "K": k, "grid": a.grid, "rtol": c.rtol, "atol": c.atol});
        write_manifest(&c.out, &name, "solve", params, None, outputs, started)?;
        println!("{name}: r = {:.9}", header.r);
        if let (Some(z), Some(u)) = (header.z_star, header.u_star) {
            println!("  psi(x0) = z* = {z:.9}, u* = {u:.9}");
        }
    }
    Ok(true)
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool, Failure> {
    let c = &a.common;
    prepare_dir(&c.out)?;
    let started = Instant::now();
    if let Some(file) = &a.file {
        let csv = fs::read_to_string(file).map_err(|e| io_err(file, e))?;
        let header_path = file.with_extension("json");
        let header_text = fs::read_to_string(&header_path).map_err(|e| io_err(&header_path, e))?;
        let header = header_from_json(&header_text)?;
        let rows = parse_solution_csv(&csv)?;
        let check = check_solution(&header, &rows, &c.solver())?;
        let name = format!("check_{}", file.file_stem().and_then(|s| s.to_str()).unwrap_or("table"));
        let mut outputs = Vec::new();
        write(&c.out.join(format!("{name}.json")), &to_json(&check)?, &mut outputs)?;
        let params = json!({"file": file.display().to_string()});
        write_manifest(&c.out, &name, "verify", params, None, outputs, started)?;
        println!(
            "{}: max |dG| = {:.3e}, max |dM| = {:.3e}, |dr| = {:.3e}, monotone = {}, endpoints = {}",
            if check.pass { "pass" } else { "FAIL" },
            check.max_cdf_error,
            check.max_map_error,
            check.r_error,
            check.monotone,
            check.endpoints_ok
        );
        return Ok(check.pass);
    }
    let spec = spec_for(a.mode, c, a.k)?;
    let eq = Equilibrium::solve(&spec, &c.solver())?;
    let grid = GridSpec { nx: a.nx, ny: a.ny, extent: a.extent };
    let cert = certify(&spec, &Candidate::from_equilibrium(&eq)?, &grid)?;
    let name = format!("certificate_{}", stem(spec.mode, spec.n, spec.x0, a.k));
    let mut outputs = Vec::new();
    write(&c.out.join(format!("{name}.json")), &to_json(&cert)?, &mut outputs)?;
    let params = json!({"mode": spec.mode, "n": spec.n, "x0": spec.x0, "K": a.k, "nx": a.nx, "ny": a.ny, "extent": a.extent});
    write_manifest(&c.out, &name, "verify", params, None, outputs, started)?;
    println!(
        "{}: max L* = {:.3e} at (x, y) = ({:.6}, {:.6}), active-set residual = {:.3e}, mean residual = {:.3e}",
        if cert.pass { "pass" } else { "FAIL" },
        cert.max_violation,
        cert.worst_point.x,
        cert.worst_point.y,
        cert.active_set_residual,
        cert.mean_residual
    );
    if let Some(d) = cert.doob_residual {
        println!("  Doob residual = {d:.3e}");
    }
    Ok(cert.pass)
}

fn cmd_simulate(a: &SimulateArgs) -> Result<bool, Failure> {
    let c = &a.common;
    prepare_dir(&c.out)?;
    let started = Instant::now();
    let spec = spec_for(a.mode, c, a.k)?;
    let eq = Equilibrium::solve(&spec, &c.solver())?;
    let rule = match a.rule {
        RuleChoice::Equilibrium => StoppingRule::for_equilibrium(&eq)?,
        RuleChoice::AzemaYor => StoppingRule::azema_yor(eq.joint.marginal_arc())?,
        RuleChoice::Perkins => {
            let map = match eq.joint.conditional() {
                regret_contest::MConditional::Past(map) => map.clone(),
                _ => regret_contest::PerkinsMap::generic(eq.joint.marginal_arc(), spec.x0),
            };
            StoppingRule::perkins(eq.joint.marginal_arc(), &map)?
        }
    };
    let mut cfg = PathConfig::new(spec.x0, a.dt, a.seed)?;
    cfg.bridge = !a.no_bridge;
    cfg.max_steps = a.max_steps;
    let rules = vec![rule.clone(); spec.n as usize];
    let report = run_contest(&spec, &rules, a.paths, &cfg)?;
    let name = format!("simulation_{}_seed{}", stem(spec.mode, spec.n, spec.x0, a.k), a.seed);
    let mut outputs = Vec::new();
    write(&c.out.join(format!("{name}.json")), &to_json(&report)?, &mut outputs)?;
    if let Some(cap) = a.samples {
        let samples = sample_rule(&rule, &cfg, (a.paths).min(cap as u64), 0)?;
        write(&c.out.join(format!("{name}_samples.csv")), &samples_csv(&samples, cap), &mut outputs)?;
    }
    let params = json!({
        "mode": spec.mode, "n": spec.n, "x0": spec.x0, "K": a.k, "paths": a.paths, "dt": a.dt,
        "rule": rule.name(), "bridge": cfg.bridge, "max_steps": a.max_steps, "ks_tol": a.ks_tol, "samples": a.samples,
    });
    write_manifest(&c.out, &name, "simulate", params, Some(a.seed), outputs, started)?;

    let fair = 1.0 / spec.n as f64;
    let mut pass = report.truncated_rate < 1e-3;
    for (i, p) in report.players.iter().enumerate() {
        let wins_ok = p.win_probability.within(fair, 3.0);
        let ks_ok = p.ks_distance.is_none_or(|d| d < a.ks_tol);
        let off_ok = p.off_support_rate.is_none_or(|o| o < 0.01);
        pass &= wins_ok && ks_ok && off_ok;
        println!(
            "player {i} ({}): win {:.4} ± {:.4}{}, payoff {:.4} ± {:.4}, mean X {:.4}, KS {}{}",
            p.rule,
            p.win_probability.mean,
            p.win_probability.se,
            if wins_ok { "" } else { " (off 1/n by more than 3 SE)" },
            p.payoff.mean,
            p.payoff.se,
            p.stopped_mean.mean,
            p.ks_distance.map(|d| format!("{d:.4}")).unwrap_or_else(|| "-".into()),
            p.off_support_rate.map(|o| format!(", off-support {o:.4}")).unwrap_or_default()
        );
    }
    println!("truncated: {:.2e}", report.truncated_rate);
    println!("{}", if pass { "pass" } else { "FAIL" });
    Ok(pass)
}

fn cmd_plot(a: &PlotArgs) -> Result<bool, Failure> {
    let c = &a.common;
    if a.k.is_empty() {
        return Err(Failure { code: 2, message: "--K needs at least one value".into() });
    }
    if a.ceiling.is_nan() || a.ceiling <= 0.0 || a.points < 2 {
        return Err(Failure { code: 2, message: "--ceiling must be positive and --points at least 2".into() });
    }
    prepare_dir(&c.out)?;
    let started = Instant::now();
    let mut solved = Vec::new();
    for &k in &a.k {
        let eq = Equilibrium::solve(&spec_for(a.mode, c, k)?, &c.solver())?;
        solved.push((k, eq));
    }
    let x_max = solved.iter().map(|(_, e)| e.right_endpoint()).fold(0.0, f64::max);
    let x0 = c.x0;
    let mut cdfs = Vec::new();
    let mut densities = Vec::new();
    for (k, eq) in &solved {
        let r = eq.right_endpoint();
        let xs: Vec<f64> = (0..=a.points).map(|i| x_max * i as f64 / a.points as f64).collect();
        cdfs.push(svg::Series {
            label: format!("K = {k}"),
            segments: vec![xs.iter().map(|&x| (x, eq.cdf.cdf(x))).collect()],
        });
        // Split at x0 and r so jumps show as gaps.
        let mut cuts = vec![0.0];
        if x0 < r && eq.spec.mode == RegretMode::PastRegret && *k > 0.0 {
            cuts.push(x0);
        }
        cuts.push(r);
        let mut segments = Vec::new();
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let m = (a.points as f64 * (hi - lo) / x_max).ceil().max(8.0) as usize;
            let eps = 1e-9 * (hi - lo);
            segments.push(
                (0..=m)
                    .map(|i| {
                        let x = lo + eps + (hi - lo - 2.0 * eps) * i as f64 / m as f64;
                        (x, eq.cdf.density(x).min(a.ceiling))
                    })
                    .collect(),
            );
        }
        if r < x_max {
            segments.push(vec![(r, 0.0), (x_max, 0.0)]);
        }
        densities.push(svg::Series { label: format!("K = {k}"), segments });
        println!("K = {k}: r = {r:.6}");
    }
    let tag = format!("{}_n{}_x{}", a.mode.as_str(), c.n, x0);
    let mut outputs = Vec::new();
    let title = format!("Equilibrium CDF G*(x), n = {}, x0 = {x0}", c.n);
    write(&c.out.join(format!("cdf_{tag}.svg")), &svg::line_chart(&title, "x", "G*(x)", x_max, 1.0, &cdfs), &mut outputs)?;
    let title = format!("Equilibrium density g*(x), n = {}, x0 = {x0}", c.n);
    write(
        &c.out.join(format!("density_{tag}.svg")),
        &svg::line_chart(&title, "x", "g*(x)", x_max, a.ceiling, &densities),
        &mut outputs,
    )?;
    let params = json!({"mode": a.mode, "n": c.n, "x0": x0, "K": a.k, "ceiling": a.ceiling, "points": a.points});
    write_manifest(&c.out, &format!("plot_{tag}"), "plot", params, None, outputs, started)?;
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
