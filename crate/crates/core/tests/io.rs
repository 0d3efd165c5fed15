use regret_contest::law::Equilibrium;
use regret_contest::model::{ContestSpec, RegretMode};
use regret_contest::past_regret::SolverConfig;
use regret_contest::io::*;


fn eq(mode: RegretMode, n: u32, k: f64) -> Equilibrium {
    Equilibrium::solve(&ContestSpec::new(n, 1.0, k, mode).unwrap(), &SolverConfig::default()).unwrap()
}

#[test]
fn twelve_significant_digits() {
    assert_eq!(fmt12(0.5), "5.00000000000e-1");
    assert_eq!(fmt12(1.0 / 3.0), "3.33333333333e-1");
    assert_eq!(fmt12(f64::INFINITY), "inf");
}

#[test]
fn csv_round_trip_and_check() {
    let e = eq(RegretMode::PastRegret, 2, 1.0);
    let rows = solution_rows(&e, 200);
    let text = solution_csv(&rows);
    let back = parse_solution_csv(&text).unwrap();
    assert_eq!(back.len(), rows.len());
    let header = solution_header(&e, rows.len());
    let h2 = header_from_json(&to_json(&header).unwrap()).unwrap();
    assert_eq!(header, h2);
    let chk = check_solution(&h2, &back, &SolverConfig::default()).unwrap();
    assert!(chk.pass, "{chk:?}");
}

#[test]
fn corrupted_table_fails_check() {
    let e = eq(RegretMode::NoRegret, 2, 0.0);
    let mut rows = solution_rows(&e, 100);
    rows[40].g += 1e-3;
    let header = solution_header(&e, rows.len());
    let chk = check_solution(&header, &rows, &SolverConfig::default()).unwrap();
    assert!(!chk.pass);
}

#[test]
fn no_regret_table_has_half_at_start() {
    let e = eq(RegretMode::NoRegret, 2, 0.0);
    let rows = solution_rows(&e, 1000);
    let row = rows.iter().find(|r| r.x == 1.0).unwrap();
    assert_eq!(row.g, 0.5);
    assert!(row.m_of_x.is_none());
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(parse_solution_csv("a,b\n1,2").is_err());
    assert!(parse_solution_csv("x,G,g,M_of_x\n1,zz,3,\n").is_err());
}
