mod common;

use std::f64::consts::PI;

use common::oval;
use ovalflow_core::{FlowSolver, FlowState, SupportCurve};
use proptest::prelude::*;

#[test]
fn circle_is_stationary_per_step() {
    let solver = FlowSolver::default();
    let mut s = FlowState::new(0.0, SupportCurve::circle(1.0, 32).unwrap());
    for _ in 0..20 {
        let next = solver.step(&s, 1e-2).unwrap();
        let diff = next.curve.harmonics().max_abs_coefficient_diff(s.curve.harmonics());
        assert!(diff < 1e-12);
        s = next;
    }
}

#[test]
fn halving_dt_is_fourth_order() {
    let c = SupportCurve::ellipse(1.2, 0.85, 8).unwrap();
    let start = FlowState::normalized(0.0, &c).unwrap();
    let solver = FlowSolver { stability: 1e9, ..FlowSolver::default() };
    let run = |n: usize| {
        let mut s = start.clone();
        for _ in 0..n {
            s = solver.rk4_substep(&s, 0.02 / n as f64).unwrap();
        }
        s
    };
    let (a, b, c) = (run(8), run(16), run(32));
    let e1 = a.curve.harmonics().max_abs_coefficient_diff(b.curve.harmonics());
    let e2 = b.curve.harmonics().max_abs_coefficient_diff(c.curve.harmonics());
    assert!(e1 / e2 > 13.0 && e1 / e2 < 19.0, "{e1} {e2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn area_and_monotone_functionals(c in oval()) {
        let traj = FlowSolver { snapshot_stride: 0.01, ..FlowSolver::default() }
            .evolve(&FlowState::new(0.0, c), 0.2, 1e-3)
            .unwrap();
        for d in &traj.diagnostics {
            prop_assert!((d.area - PI).abs() < 1e-10);
        }
        for w in traj.diagnostics.windows(2) {
            prop_assert!(w[1].entropy <= w[0].entropy + 1e-10);
            prop_assert!(w[1].w <= w[0].w + 1e-10);
        }
        for s in &traj.states {
            prop_assert!(s.curve.min_radius() > 0.0);
        }
    }
}

#[test]
fn tail_norms_decrease() {
    let c = SupportCurve::ellipse(1.25, 0.8, 32).unwrap();
    let traj = FlowSolver::default().evolve(&FlowState::new(0.0, c), 3.0, 1e-3).unwrap();
    let tail: Vec<_> = traj.diagnostics.iter().filter(|d| d.t >= 1.0).collect();
    for w in tail.windows(2) {
        assert!(w[1].knorm <= w[0].knorm);
    }
    let last = traj.last();
    let dev = (0..256)
        .map(|i| (last.curve.support(i as f64 * PI / 128.0) - 1.0).abs())
        .fold(0.0, f64::max);
    assert!(dev < 1e-2 && tail.last().unwrap().knorm < 1e-2);
}
