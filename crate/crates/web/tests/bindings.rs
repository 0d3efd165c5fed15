use regret_contest_web::{certificate, curves, histogram};

#[test]
fn curves_for_past_regret() {
    let v = curves("past", 2, 1.0, 1.0, 200).unwrap();
    assert!((v["r"].as_f64().unwrap() - 1.629445).abs() < 1e-6);
    let cdf = v["cdf"].as_array().unwrap();
    assert_eq!(cdf.len(), 201);
    assert_eq!(cdf[0].as_f64().unwrap(), 0.0);
    assert!((cdf[200].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let jump = v["density_jump"].as_array().unwrap();
    assert!((jump[1].as_f64().unwrap() / jump[0].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert!((v["value"].as_f64().unwrap() - v["psi_x0"].as_f64().unwrap()).abs() < 1e-8);
}

#[test]
fn curves_for_no_regret_have_no_map() {
    let v = curves("none", 2, 1.0, 0.0, 100).unwrap();
    assert!(v["m_of_x"].as_array().unwrap().iter().all(|m| m.is_null()));
    assert_eq!(v["cdf"][50].as_f64().unwrap(), 0.5);
    assert!(v["psi_x0"].is_null());
}

#[test]
fn bad_input_is_reported() {
    assert!(curves("sideways", 2, 1.0, 0.0, 100).is_err());
    assert!(curves("none", 1, 1.0, 0.0, 100).is_err());
    assert!(curves("none", 2, 1.0, 0.0, 1).is_err());
    assert!(histogram("none", 2, 1.0, 0.0, 0, 1e-3, 1, 20).is_err());
}

#[test]
fn certificate_passes_on_coarse_grid() {
    let v = certificate("future", 2, 1.0, 1.0, 400, 40).unwrap();
    assert_eq!(v["pass"], true);
}

#[test]
fn histogram_matches_target() {
    let v = histogram("none", 2, 1.0, 0.0, 4000, 1e-3, 3, 20).unwrap();
    assert!(v["ks"].as_f64().unwrap() < 0.05);
    let d = v["density"].as_array().unwrap();
    let total: f64 = d.iter().map(|x| x.as_f64().unwrap()).sum::<f64>() * v["bin_width"].as_f64().unwrap();
    assert!((total - 1.0).abs() < 1e-12);
    assert_eq!(histogram("none", 2, 1.0, 0.0, 500, 1e-3, 3, 20).unwrap(), histogram("none", 2, 1.0, 0.0, 500, 1e-3, 3, 20).unwrap());
}
