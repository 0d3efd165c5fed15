use regret_contest::error::Error;
use regret_contest::ode::*;


#[test]
fn locates_event_of_linear_decay() {
    // y' = -1, y(0) = 1: event y = 0 at t = 1.
    let ctl = StepControl { h_max: 0.03, ..Default::default() };
    let tr = integrate_to_event(|_, _y: &[f64; 1]| [-1.0], |y| y[0], 0.0, [1.0], 10.0, &ctl).unwrap();
    let te = *tr.t.last().unwrap();
    assert!((te - 1.0).abs() < 1e-11, "{te}");
    assert!(tr.event_bracket.1 - tr.event_bracket.0 <= 1e-12);
}

#[test]
fn integrates_exponential_accurately() {
    // y' = y, event when 3 - y hits zero: t = ln 3.
    let tr = integrate_to_event(|_, y: &[f64; 1]| [y[0]], |y| 3.0 - y[0], 0.0, [1.0], 10.0, &StepControl::default())
        .unwrap();
    let te = *tr.t.last().unwrap();
    assert!((te - 3f64.ln()).abs() < 1e-10);
    for (t, y) in tr.t.iter().zip(&tr.y) {
        assert!((y[0] - t.exp()).abs() < 1e-9);
    }
}

#[test]
fn reports_missing_event() {
    let r = integrate_to_event(|_, _y: &[f64; 1]| [0.0], |y| y[0], 0.0, [1.0], 1.0, &StepControl::default());
    assert!(matches!(r, Err(Error::SolverFailure(_))));
}
