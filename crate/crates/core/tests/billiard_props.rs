mod common;

use std::f64::consts::{PI, TAU};

use common::{oval, wrapped_gap};
use ovalflow_core::billiard::{
    generating_length_theta, involution, mat_det, midpoint_solve, reflect, symplectic_jacobian, PhasePoint,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn reversible_and_area_preserving(c in oval(), theta in 0.0..TAU, phi in 0.05..PI - 0.05) {
        let p = PhasePoint::new(theta, phi).unwrap();
        let rec = reflect(&c, p).unwrap();
        let q = involution(reflect(&c, involution(rec.to)).unwrap().to);
        prop_assert!(wrapped_gap(q.theta, p.theta) + (q.phi - p.phi).abs() < 1e-9);
        prop_assert!((mat_det(&symplectic_jacobian(&c, &rec)) - 1.0).abs() < 1e-9);
        let (_, d0, d1) = generating_length_theta(&c, rec.from.theta, rec.to.theta).unwrap();
        prop_assert!((d0 + rec.from.phi.cos()).abs() < 1e-7);
        prop_assert!((d1 - rec.to.phi.cos()).abs() < 1e-7);
    }

    #[test]
    fn midpoint_obeys_reflection_law(c in oval(), a in 0.0..TAU, span in 1.0f64..4.0) {
        let b = midpoint_solve(&c, a, a + span).unwrap();
        let (xa, xb, xc) = (c.position(a), c.position(b), c.position(a + span));
        let u1 = (xb - xa).normalized();
        let u2 = (xc - xb).normalized();
        let t = c.tangent(b);
        // equal angles with the tangent on both sides
        prop_assert!((u1.dot(t) - u2.dot(t)).abs() < 1e-9);
    }
}
