mod common;

use std::f64::consts::{PI, TAU};

use common::oval;
use ovalflow_core::numerics::GaussLegendre;
use ovalflow_core::periodic::{
    class_from_half_trace, diameter_half_trace, f_time_derivative, find_diameters, pair_function,
};
use ovalflow_core::{OrbitClass, SupportCurve};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // f(θ) = −h′(θ + π) − h′(θ) is π-periodic, so its roots come in antipodal pairs
    #[test]
    fn pair_function_is_pi_periodic_with_zero_mean(c in oval(), theta in 0.0..TAU) {
        prop_assert!((pair_function(&c, theta + PI) - pair_function(&c, theta)).abs() < 1e-13);
        let mean = GaussLegendre::<f64>::new(16).integrate(0.0, TAU, 32, |t| pair_function(&c, t));
        prop_assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn classes_agree_with_trace(c in oval()) {
        for o in find_diameters(&c).orbits() {
            if o.klass == OrbitClass::Parabolic {
                continue;
            }
            let ht = diameter_half_trace(&c, o.theta).unwrap();
            prop_assert_eq!(class_from_half_trace(ht, 1e-9), o.klass);
        }
    }
}

#[test]
fn constant_width_rigidity() {
    let circle = SupportCurve::<f64>::circle(1.0, 16).unwrap();
    let nodes = circle.grid().nodes();
    assert!(nodes.iter().all(|&t| pair_function(&circle, t).abs() < 1e-14));
    assert!(nodes.iter().all(|&t| f_time_derivative(&circle, t).abs() < 1e-12));
    assert!(find_diameters(&circle).is_continuum());
    // a non-circular constant-width curve has f ≡ 0 but f_t ≢ 0
    let cw = SupportCurve::<f64>::constant_width(2.0, &[(3, 0.05, 0.0)], 16).unwrap();
    assert!(nodes.iter().all(|&t| pair_function(&cw, t).abs() < 1e-14));
    assert!(nodes.iter().any(|&t| f_time_derivative(&cw, t).abs() > 1e-3));
}
