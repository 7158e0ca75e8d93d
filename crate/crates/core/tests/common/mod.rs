#![allow(dead_code)]

use ovalflow_core::{Curve64, Harmonics, SupportCurve};
use proptest::prelude::*;

/// `h = 1 + Σ_{n=2}^{5} (c_n cos nθ + s_n sin nθ)` with `Σ (n² − 1)(|c_n| + |s_n|) < 0.8`,
/// which keeps `R = h + h″ ≥ 0.2`.
pub fn oval() -> impl Strategy<Value = Curve64> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4).prop_map(|cs| {
        let mut h = Harmonics::<f64>::zeros(16);
        h.cos[0] = 1.0;
        let budget: f64 = cs
            .iter()
            .enumerate()
            .map(|(i, (c, s))| ((i + 2) * (i + 2) - 1) as f64 * (c.abs() + s.abs()))
            .sum();
        let scale = if budget > 0.0 { 0.8 / budget.max(0.8) * 0.9 } else { 0.0 };
        for (i, (c, s)) in cs.iter().enumerate() {
            h.cos[i + 2] = c * scale * 0.25;
            h.sin[i + 2] = s * scale * 0.25;
        }
        SupportCurve::new(h, 64).expect("admissible oval")
    })
}

pub fn wrapped_gap(a: f64, b: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    ((a - b + tau / 2.0).rem_euclid(tau) - tau / 2.0).abs()
}
