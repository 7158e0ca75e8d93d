mod common;

use std::f64::consts::{PI, TAU};

use common::oval;
use ovalflow_core::billiard::{reflect, PhasePoint};
use ovalflow_core::periodic::{pair_derivative, pair_function};
use ovalflow_core::SupportCurve;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn convex_and_closed(c in oval()) {
        let s = c.grid_sample();
        prop_assert!(s.radius.iter().all(|r| *r > 0.0));
        for t in c.grid().nodes() {
            prop_assert!(c.position(t + TAU).distance(c.position(t)) < 1e-13);
        }
    }

    #[test]
    fn chord_integral_matches_distance(c in oval(), theta in 0.0..TAU, phi in 0.1..PI - 0.1) {
        let rec = reflect(&c, PhasePoint::new(theta, phi).unwrap()).unwrap();
        let integral = c.chord_length_integral(rec.from.theta, rec.to.theta, phi).unwrap();
        prop_assert!((integral - rec.chord).abs() < 1e-8 * c.perimeter());
    }

    #[test]
    fn evolute_identities(c in oval()) {
        for t in c.grid().nodes() {
            let d = c.evolute(t + PI) - c.evolute(t);
            let f = pair_function(&c, t);
            let fp = pair_derivative(&c, t);
            prop_assert!((d.dot(c.tangent(t)) - f).abs() < 1e-10);
            prop_assert!((d.dot(d) - f * f - fp * fp).abs() < 1e-10);
        }
    }

    #[test]
    fn ellipse_trace(a in 0.6f64..1.6, ratio in 0.6f64..1.0) {
        let b = a * ratio;
        let c = SupportCurve::ellipse(a, b, 64).unwrap();
        for t in c.grid().nodes() {
            let p = c.position(t);
            prop_assert!((p.x * p.x / (a * a) + p.y * p.y / (b * b) - 1.0).abs() < 1e-6);
        }
    }
}
