//! Qualitative shapes of solved paths at fixed parameter sets, including
//! parameter sets where a shape holds only partially.

use brainstorm::*;

fn interior_extrema(v: &[f64]) -> (usize, usize) {
    let mut minima = 0;
    let mut maxima = 0;
    for w in v.windows(3) {
        if w[1] < w[0] && w[1] < w[2] {
            minima += 1;
        }
        if w[1] > w[0] && w[1] > w[2] {
            maxima += 1;
        }
    }
    (minima, maxima)
}

#[test]
fn belief_thresholds_decline_in_slow_hard_example() {
    let p = ModelParams::new(1.0, 0.75, 0.5, 2.0, 0.25, 0.2).unwrap();
    let s = solve_learning_thresholds(&p, 10).unwrap();
    let b = s.belief_thresholds(&p);
    assert!(b.windows(2).all(|w| w[1].0 < w[0].0 && w[1].1 > w[0].1), "{b:?}");
}

#[test]
fn belief_thresholds_can_rise_when_hard_state_is_slow() {
    // Posterior mass shifts to the slow state, whose validity belief decays
    // more slowly, so the per-approach belief at brainstorm times increases.
    let p = ModelParams::new(0.5, 0.5, 0.1, 1.0, 0.1, 0.030_833_333_333_333_338).unwrap();
    let b = solve_learning_thresholds(&p, 8).unwrap().belief_thresholds(&p);
    assert!(b.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1), "{b:?}");
}

#[test]
fn impossible_hard_state_truncates() {
    let p = ModelParams::new(1.0, 0.75, 0.5, 2.0, 0.0, 0.1).unwrap();
    let s = solve_learning_thresholds(&p, 1000).unwrap();
    // the first-order condition tends to zero from above, so no approach
    // beyond the first is ever brainstormed
    assert_eq!(s.n_bar, Some(1));
    assert!(s.thresholds.is_empty());
    let cheaper = solve_learning_thresholds(&p.with_cost(0.05).unwrap(), 1000).unwrap();
    assert_eq!(cheaper.n_bar, Some(2));
    assert!(cheaper.residuals.iter().all(|r| r.abs() < 1e-10));
    assert!(cheaper.horizon().is_infinite());
}

#[test]
fn learning_breadth_is_concave_only_early() {
    let p = ModelParams::new(1.0, 0.75, 0.5, 2.0, 1.0, 0.1).unwrap();
    let grid = TimeGrid::linear(0.05, 60.0, 1200).unwrap();
    let tr = solve_trajectory(&p, &grid).unwrap();
    let h = grid.times()[1] - grid.times()[0];
    let second: Vec<f64> = tr.breadth.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / (h * h)).collect();
    assert!(second[..20].iter().all(|v| *v < 0.0));
    let max = second.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(max > 1e-3, "{max}");
    // slope dips below its limit 1 / d_h before recovering
    let d_h = depth_limits(&p).unwrap().d_h;
    let slopes: Vec<f64> = tr.breadth.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    assert!(slopes.iter().cloned().fold(f64::INFINITY, f64::min) < 1.0 / d_h - 1e-3);
}

#[test]
fn impossible_hard_state_contract_shapes() {
    let grid = TimeGrid::log(0.01, 30.0, 120).unwrap();
    let low = ModelParams::new(1.0, 0.9, 0.1, 3.0, 0.0, 0.3).unwrap();
    let a = solve_dynamic_contract(&low, &grid).unwrap().alpha;
    let i_min = a.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1)).unwrap().0;
    assert!(i_min > 0 && i_min < a.len() - 1);
    assert!(a[..=i_min].windows(2).all(|w| w[1] <= w[0]));
    assert!(a[i_min] < a[a.len() - 1]);

    let high = ModelParams::new(1.0, 0.9, 0.3, 3.0, 0.0, 0.3).unwrap();
    let a = solve_dynamic_contract(&high, &grid).unwrap().alpha;
    assert!(a.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert!(a[a.len() - 1] > a[0]);
}

#[test]
fn slow_hard_state_contract_shapes() {
    let grid = TimeGrid::log(0.01, 300.0, 400).unwrap();
    // nearly sure of the easy state: shares fall throughout
    let p = ModelParams::new(1.0, 0.9, 0.05, 3.0, 0.05, 0.3).unwrap();
    let c = solve_dynamic_contract(&p, &grid).unwrap();
    assert!(c.alpha.windows(2).all(|w| w[1] < w[0]));
    assert!((c.alpha.last().unwrap() - 1.0 / 3.0).abs() < 1e-2);
    assert!(c.violations.is_empty());
    // a larger hard prior produces a dip, a rise and a final decline
    let q = p.with_delta0(0.15).unwrap();
    let c = solve_dynamic_contract(&q, &grid).unwrap();
    assert_eq!(interior_extrema(&c.alpha), (1, 1));
    assert!(*c.alpha.last().unwrap() > 1.0 / 3.0);
}
