use regret_contest::interp::*;

use proptest::prelude::*;

#[test]
fn reproduces_knot_values() {
    let x = vec![0.0, 1.0, 2.0, 4.0];
    let y = vec![0.0, 0.5, 0.6, 1.0];
    let p = MonotoneCubic::pchip(x.clone(), y.clone()).unwrap();
    for (a, b) in x.iter().zip(&y) {
        assert!((p.eval(*a) - b).abs() < 1e-15);
    }
}

#[test]
fn rejects_unsorted_knots() {
    assert!(MonotoneCubic::pchip(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
}

#[test]
fn exact_slopes_give_fourth_order_accuracy() {
    let x: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
    let y: Vec<f64> = x.iter().map(|t| t.exp()).collect();
    let p = MonotoneCubic::with_slopes(x, y.clone(), y).unwrap();
    let err = (0..1000)
        .map(|i| {
            let t = i as f64 / 1000.0;
            (p.eval(t) - t.exp()).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
}

proptest! {
    #[test]
    fn pchip_preserves_monotonicity(steps in proptest::collection::vec(0.0f64..3.0, 3..30)) {
        let x: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
        let mut acc = 0.0;
        let y: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
        let p = MonotoneCubic::pchip(x, y).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let t = k as f64 * (steps.len() - 1) as f64 / 400.0;
            let v = p.eval(t);
            prop_assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn inverse_undoes_eval(steps in proptest::collection::vec(0.01f64..3.0, 3..20), frac in 0.0f64..1.0) {
        let x: Vec<f64> = (0..steps.len()).map(|i| i as f64 * 0.5).collect();
        let mut acc = 0.0;
        let y: Vec<f64> = steps.iter().map(|s| { acc += s; acc }).collect();
        let p = MonotoneCubic::pchip(x.clone(), y).unwrap();
        let t = frac * *x.last().unwrap();
        prop_assert!((p.inverse(p.eval(t)) - t).abs() < 1e-9);
    }
}
