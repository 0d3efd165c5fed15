use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_regret-contest"));
    c.env_remove("REGRET_CONTEST_OUT");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regret-contest-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn cdf_at(csv: &str, x: f64) -> f64 {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse::<f64>().unwrap_or(f64::NAN)).collect::<Vec<_>>())
        .find(|f| f[0] == x)
        .map(|f| f[1])
        .unwrap()
}

#[test]
fn solve_no_regret_two_players() {
    let dir = scratch("solve-none");
    let o = run(&["solve", "--mode", "none", "--n", "2", "--x0", "1"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.join("none_n2_x1_K0.csv")).unwrap();
    assert!(csv.starts_with("x,G,g,M_of_x\n"));
    assert_eq!(cdf_at(&csv, 1.0), 0.5);
    assert!(dir.join("none_n2_x1_K0.manifest.json").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("none_n2_x1_K0.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "solve");
}

#[test]
fn solve_past_two_players_header() {
    let dir = scratch("solve-past");
    let o = run(&["solve", "--mode", "past", "--n", "2", "--x0", "1", "--K", "1"], &dir);
    assert_eq!(code(&o), 0);
    let h: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("past_n2_x1_K1.json")).unwrap()).unwrap();
    assert!((h["r"].as_f64().unwrap() - 1.629445).abs() < 1e-6);
    assert!(h["psi_x0"].as_f64().is_some() && h["u_star"].as_f64().is_some() && h["z_star"].as_f64().is_some());
}

#[test]
fn all_regret_table_equals_no_regret() {
    let dir = scratch("solve-all");
    assert_eq!(code(&run(&["solve", "--mode", "all", "--n", "3", "--x0", "1", "--K", "7"], &dir)), 0);
    assert_eq!(code(&run(&["solve", "--mode", "none", "--n", "3", "--x0", "1", "--K", "0"], &dir)), 0);
    let a = fs::read(dir.join("all_n3_x1_K7.csv")).unwrap();
    let b = fs::read(dir.join("none_n3_x1_K0.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn solve_accepts_penalty_lists_and_is_deterministic() {
    let dir = scratch("solve-list");
    let args = ["solve", "--mode", "past", "--n", "3", "--K", "0.5,1,2", "--grid", "200"];
    assert_eq!(code(&run(&args, &dir)), 0);
    let first: Vec<Vec<u8>> =
        ["0.5", "1", "2"].iter().map(|k| fs::read(dir.join(format!("past_n3_x1_K{k}.csv"))).unwrap()).collect();
    assert_eq!(code(&run(&args, &dir)), 0);
    for (k, before) in ["0.5", "1", "2"].iter().zip(first) {
        assert_eq!(fs::read(dir.join(format!("past_n3_x1_K{k}.csv"))).unwrap(), before);
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = scratch("usage");
    assert_eq!(code(&run(&["solve", "--mode", "sideways"], &dir)), 2);
    assert_eq!(code(&run(&["solve", "--n", "1"], &dir)), 2);
    assert_eq!(code(&run(&["solve", "--x0", "-1"], &dir)), 2);
    assert_eq!(code(&run(&["plot", "--mode", "past", "--n", "3"], &dir)), 2);
}

#[test]
fn verify_certifies_three_player_past_regret() {
    let dir = scratch("verify-past");
    let o = run(&["verify", "--mode", "past", "--n", "3", "--x0", "1", "--K", "1", "--nx", "1500", "--ny", "150"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("certificate_past_n3_x1_K1.json")).unwrap()).unwrap();
    assert!(cert["pass"].as_bool().unwrap());
    assert!(cert["max_violation"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_rejects_corrupted_table() {
    let dir = scratch("verify-file");
    assert_eq!(code(&run(&["solve", "--mode", "past", "--n", "2", "--K", "1", "--grid", "300"], &dir)), 0);
    let csv_path = dir.join("past_n2_x1_K1.csv");
    let ok = run(&["verify", "--file", csv_path.to_str().unwrap()], &dir);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stdout));

    let text = fs::read_to_string(&csv_path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut fields: Vec<String> = lines[120].split(',').map(String::from).collect();
    let g: f64 = fields[1].parse().unwrap();
    fields[1] = format!("{:.11e}", g + 1e-3);
    lines[120] = fields.join(",");
    fs::write(&csv_path, lines.join("\n") + "\n").unwrap();
    let bad = run(&["verify", "--file", csv_path.to_str().unwrap()], &dir);
    assert_eq!(code(&bad), 1);

    fs::write(&csv_path, "x,G,g,M_of_x\n0,zero,1,\n").unwrap();
    assert_eq!(code(&run(&["verify", "--file", csv_path.to_str().unwrap()], &dir)), 1);
}

#[test]
fn simulate_symmetric_contest() {
    let dir = scratch("simulate");
    let args = ["simulate", "--mode", "none", "--n", "2", "--paths", "4000", "--dt", "1e-3", "--seed", "7", "--ks-tol", "0.05", "--samples", "100"];
    let o = run(&args, &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let report = dir.join("simulation_none_n2_x1_K0_seed7.json");
    let first = fs::read(&report).unwrap();
    let samples = fs::read_to_string(dir.join("simulation_none_n2_x1_K0_seed7_samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 101);
    assert_eq!(code(&run(&args, &dir)), 0);
    assert_eq!(fs::read(&report).unwrap(), first);
}

#[test]
fn plot_writes_both_figures() {
    let dir = scratch("plot");
    let o = run(&["plot", "--mode", "past", "--n", "3", "--x0", "1", "--K", "0.5,1,2"], &dir);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let rs: Vec<f64> = stdout.lines().filter_map(|l| l.split("r = ").nth(1)).map(|v| v.parse().unwrap()).collect();
    assert_eq!(rs.len(), 3);
    assert!(rs[0] > rs[1] && rs[1] > rs[2]);
    for name in ["cdf_past_n3_x1.svg", "density_past_n3_x1.svg"] {
        let svg = fs::read_to_string(dir.join(name)).unwrap();
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("K = ").count(), 3);
    }
    // Densities are split at x0, so each curve has at least two pieces.
    let density = fs::read_to_string(dir.join("density_past_n3_x1.svg")).unwrap();
    assert!(density.matches("<polyline").count() >= 6);
}

#[test]
fn output_directory_from_environment() {
    let dir = scratch("env");
    let o = bin().args(["solve", "--mode", "none", "--n", "3"]).env("REGRET_CONTEST_OUT", &dir).output().unwrap();
    assert_eq!(code(&o), 0);
    assert!(dir.join("none_n3_x1_K0.csv").exists());
}

#[test]
fn help_lists_flags_with_defaults() {
    for sub in ["solve", "verify", "simulate", "plot"] {
        let o = bin().args([sub, "--help"]).output().unwrap();
        let text = String::from_utf8_lossy(&o.stdout);
        assert!(text.contains("--mode") && text.contains("--out") && text.contains("[default:"), "{sub}");
    }
}
