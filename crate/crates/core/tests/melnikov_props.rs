use std::f64::consts::PI;

use ovalflow_core::elliptic::{elliptic_f, jacobi};
use ovalflow_core::melnikov::{
    length_reduction_residual, chord_bracket_residual, melnikov_potential, resonance_solve, tangency_residual, Mu1Form,
};
use ovalflow_core::EllipseParams;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn jacobi_identities(u in -20.0f64..20.0, k in 0.0f64..0.999) {
        let j = jacobi(u, k).unwrap();
        prop_assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
        prop_assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sn_inverts_f(phi in -PI..PI, k in 0.0f64..0.99) {
        let u = elliptic_f(phi, k).unwrap();
        prop_assert!((jacobi(u, k).unwrap().sn - phi.sin()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn caustic_orbit_identities(a in 1.15f64..1.6, t in -2.0f64..2.0) {
        let e = EllipseParams::new(a, 0.8).unwrap();
        let res = resonance_solve(&e, 1, 2).unwrap().expect("1/4 is inside the rotation range");
        let pts = res.orbit(&e, t).unwrap();
        prop_assert!(tangency_residual(&e, &res, &pts) < 1e-8);
        let angles = res.orbit_angles(&e, t).unwrap();
        prop_assert!(chord_bracket_residual(&e, &res, &angles).unwrap() < 1e-6);
        prop_assert!(length_reduction_residual(&e, &res, &angles, Mu1Form::CnSn).unwrap() < 1e-7);
    }
}

#[test]
fn potential_is_even_and_periodic() {
    let e = EllipseParams::new(1.25, 0.8).unwrap();
    let curve = e.curve(e.harmonic_count()).unwrap();
    let res = resonance_solve(&e, 3, 4).unwrap().unwrap();
    for i in 0..12 {
        let t = 0.13 * i as f64;
        let w = melnikov_potential(&e, &res, &curve, t, Mu1Form::CnSn).unwrap();
        let wp = melnikov_potential(&e, &res, &curve, t + res.period, Mu1Form::CnSn).unwrap();
        let wm = melnikov_potential(&e, &res, &curve, -t, Mu1Form::CnSn).unwrap();
        assert!((w - wp).abs() < 1e-9 && (w - wm).abs() < 1e-9);
    }
}
