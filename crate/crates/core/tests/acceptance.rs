//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so the lines are
//! always shown; exits non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;
use std::time::Instant;

use ovalflow_core::billiard::{generating_length_theta, involution, mat_det, reflect, symplectic_jacobian};
use ovalflow_core::flow::decay_rates_between;
use ovalflow_core::melnikov::{
    length_reduction_residual, closure_residual, chord_bracket_residual, melnikov_curve, resonance_solve, Mu1Form,
};
use ovalflow_core::normal::{
    diffeo_certificate, envelope_margin, evolute_containment, np_detect, wavefront, wavefront_deviation,
};
use ovalflow_core::periodic::{
    class_from_half_trace, diameter_half_trace, find_diameters, integrated_f, pair_function,
};
use ovalflow_core::{
    Curve64, EllipseParams, FlowSolver, FlowState, OrbitClass, PhasePoint, Result, SupportCurve, Trajectory64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x0a1f_2026;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn max_on_grid(n: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..n).map(|i| f(2.0 * PI * i as f64 / n as f64)).fold(0.0, f64::max)
}

/// ellipse(1.25, 0.8) with 64 harmonics evolved to t = 6, snapshots every 0.05.
fn reference_run(harmonics: usize, dt: f64) -> Result<Trajectory64> {
    let curve = SupportCurve::ellipse(1.25, 0.8, harmonics)?;
    FlowSolver::default().evolve(&FlowState::new(0.0, curve), 6.0, dt)
}

fn reference() -> &'static Result<Trajectory64> {
    static RUN: OnceLock<Result<Trajectory64>> = OnceLock::new();
    RUN.get_or_init(|| reference_run(64, 1e-3))
}

fn shared() -> Result<&'static Trajectory64> {
    reference().as_ref().map_err(Clone::clone)
}

fn c1_flow_fixed_point() -> Result<Outcome> {
    let circle = SupportCurve::circle(1.0, 64)?;
    let traj = FlowSolver::default().evolve(&FlowState::new(0.0, circle), 5.0, 1e-3)?;
    let worst = traj
        .states
        .iter()
        .map(|s| max_on_grid(256, |t| (s.curve.support(t) - 1.0).abs()))
        .fold(0.0, f64::max);
    outcome(worst < 1e-10, format!("max|h − 1| over {} snapshots = {worst:.2e}", traj.len()))
}

fn c2_normalization() -> Result<Outcome> {
    let traj = shared()?;
    let d = &traj.diagnostics;
    let area = d.iter().map(|x| (x.area - PI).abs()).fold(0.0, f64::max);
    let rise_e = d.windows(2).map(|w| w[1].entropy - w[0].entropy).fold(f64::MIN, f64::max);
    let rise_w = d.windows(2).map(|w| w[1].w - w[0].w).fold(f64::MIN, f64::max);
    outcome(
        area < 1e-10 && rise_e <= 1e-10 && rise_w <= 1e-10,
        format!("max|area − π| = {area:.2e}, largest step rise: entropy {rise_e:.2e}, w {rise_w:.2e}"),
    )
}

fn c3_decay_rate() -> Result<Outcome> {
    let slope = |t: &Trajectory64| decay_rates_between(t, 3.0, 6.0).map(|r| r.0);
    let base = slope(&reference_run(32, 1e-3)?)?;
    let half_dt = slope(&reference_run(32, 5e-4)?)?;
    let double_n = slope(shared()?)?;
    let pass = (-2.5..=-1.5).contains(&base) && (half_dt - base).abs() <= 0.1 && (double_n - base).abs() <= 0.1;
    outcome(
        pass,
        format!("slope {base:.4} (N = 32), {half_dt:.4} (dt/2), {double_n:.4} (N = 64)"),
    )
}

fn c4_billiard_identities() -> Result<Outcome> {
    let curve: Curve64 = SupportCurve::ellipse(1.25, 0.8, 64)?;
    let perimeter = curve.perimeter();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut rev, mut gen, mut det, mut chord) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let p = PhasePoint::new(rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.05..PI - 0.05))?;
        let rec = reflect(&curve, p)?;
        let back = reflect(&curve, involution(rec.to))?;
        let q = involution(back.to);
        let dtheta = (q.theta - p.theta + PI).rem_euclid(2.0 * PI) - PI;
        rev = rev.max(dtheta.abs() + (q.phi - p.phi).abs());
        let (_, ds0, ds1) = generating_length_theta(&curve, rec.from.theta, rec.to.theta)?;
        gen = gen.max((ds0 + rec.from.phi.cos()).abs()).max((ds1 - rec.to.phi.cos()).abs());
        det = det.max((mat_det(&symplectic_jacobian(&curve, &rec)) - 1.0).abs());
        let integral = match curve.chord_length_integral(rec.from.theta, rec.to.theta, rec.from.phi) {
            Ok(v) => v,
            Err(ovalflow_core::Error::InconsistentChord { integral, .. }) => integral,
            Err(e) => return Err(e),
        };
        chord = chord.max((integral - rec.chord).abs());
    }
    outcome(
        rev < 1e-9 && gen < 1e-7 && det < 1e-9 && chord < 1e-8 * perimeter,
        format!("reversibility {rev:.1e}, partials {gen:.1e}, |det − 1| {det:.1e}, chord integral {chord:.1e}"),
    )
}

fn c5_diameters() -> Result<Outcome> {
    let curve: Curve64 = SupportCurve::ellipse(1.25, 0.8, 64)?;
    let set = find_diameters(&curve);
    let orbits = set.orbits();
    let find = |theta: f64| orbits.iter().find(|o| (o.theta - theta).abs() < 1e-6);
    let (Some(major), Some(minor)) = (find(FRAC_PI_2), find(0.0).or_else(|| find(PI))) else {
        return outcome(false, format!("diameters at {:?}", orbits.iter().map(|o| o.theta).collect::<Vec<_>>()));
    };
    let mut agree = true;
    for o in [major, minor] {
        agree &= class_from_half_trace(diameter_half_trace(&curve, o.theta)?, 1e-9) == o.klass;
    }
    let pass = orbits.len() == 2
        && major.klass == OrbitClass::Hyperbolic
        && minor.klass == OrbitClass::Elliptic
        && (major.f_prime - 1.476).abs() < 1e-6
        && (minor.f_prime + 2.30625).abs() < 1e-6
        && agree;
    outcome(
        pass,
        format!(
            "{} orbits; major {} f′ = {:.9}, minor {} f′ = {:.9}; trace test agrees: {agree}",
            orbits.len(),
            major.klass,
            major.f_prime,
            minor.klass,
            minor.f_prime
        ),
    )
}

fn c6_constant_width_breaking() -> Result<Outcome> {
    let curve = SupportCurve::constant_width(2.0, &[(3, 0.05, 0.0)], 32)?;
    let solver = FlowSolver {
        snapshot_stride: 1e-3,
        ..FlowSolver::default()
    };
    let traj = solver.evolve(&FlowState::new(0.0, curve), 0.1, 1e-3)?;
    let f0 = max_on_grid(512, |t| pair_function(&traj.first().curve, t).abs());
    let f1 = max_on_grid(512, |t| pair_function(&traj.last().curve, t).abs());
    let mut gap = 0.0f64;
    for i in 0..64 {
        let theta = PI * i as f64 / 64.0;
        let direct = pair_function(&traj.last().curve, theta);
        gap = gap.max((direct - integrated_f(&traj, theta, 0.0, traj.last().t)?).abs());
    }
    outcome(
        f0 < 1e-9 && f1 > 1e-4 && gap < 1e-4,
        format!("max|f| = {f0:.1e} at t = 0, {f1:.3e} at t = 0.1; integrated form gap {gap:.1e}"),
    )
}

fn c7_np_destruction() -> Result<Outcome> {
    let curve = SupportCurve::ellipse(2.0, 0.5, 128)?;
    let (contained0, _) = evolute_containment(&curve);
    let cert0 = diffeo_certificate(&curve, 1)?;
    let solver = FlowSolver {
        snapshot_stride: 0.25,
        truncation: Some(1e-15),
        ..FlowSolver::default()
    };
    let mut state = FlowState::normalized(0.0, &curve)?;
    let mut found = None;
    while state.t < 8.0 - 1e-9 {
        state = solver.evolve(&state, state.t + 0.25, 1e-3)?.last().clone();
        if !evolute_containment(&state.curve).0 || !diffeo_certificate(&state.curve, 2)?.ok {
            continue;
        }
        if np_detect(&state.curve, 2)?.irreducible().is_empty() {
            found = Some(state.t);
            break;
        }
    }
    let start_ok = !contained0 && !cert0.ok && cert0.witness.is_some();
    outcome(
        start_ok && found.is_some(),
        format!(
            "t = 0: evolute contained {contained0}, certificate(1) witness θ = {:?}; all three hold from t = {}",
            cert0.witness,
            found.map_or("never (t ≤ 8)".to_string(), |t| format!("{t:.2}"))
        ),
    )
}

fn c8_envelope_asymptotics() -> Result<Outcome> {
    let traj = shared()?;
    let mut rows = Vec::new();
    for s in traj.states.iter().filter(|s| s.t >= 5.0 - 1e-9) {
        let (dl, dx) = wavefront_deviation(&s.curve, 8, 64)?;
        let (margin, singular) = envelope_margin(&s.curve, 8, 64)?;
        rows.push((dl, dx, margin, singular));
    }
    let small = rows.iter().all(|r| r.0 < 0.05 && r.1 < 0.05);
    let monotone = rows.windows(2).all(|w| w[1].0 <= w[0].0 + 1e-12 && w[1].1 <= w[0].1 + 1e-12);
    let interior = rows.iter().all(|r| r.2 > 0.0 && r.3 == 0);
    let first = rows.first().copied().unwrap_or_default();
    let last = rows.last().copied().unwrap_or_default();
    outcome(
        !rows.is_empty() && small && monotone && interior,
        format!(
            "{} snapshots, max|l − 2| {:.2e} → {:.2e}, max|x − 1| {:.2e} → {:.2e}, min margin {:.3}",
            rows.len(),
            first.0,
            last.0,
            first.1,
            last.1,
            rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min)
        ),
    )
}

fn c9_melnikov() -> Result<Outcome> {
    let e = EllipseParams::new(1.25, 0.8)?;
    let curve = e.curve(e.harmonic_count())?;
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, q) in [(1, 2), (1, 3), (3, 4)] {
        let Some(res) = resonance_solve(&e, p, q)? else {
            parts.push(format!("({p},{}) outside rotation range", 2 * q));
            continue;
        };
        let c = melnikov_curve(&e, &res, 256)?;
        let (mut c1, mut c2, mut closure) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..16 {
            let t = res.period * i as f64 / 16.0;
            let angles = res.orbit_angles(&e, t)?;
            c1 = c1.max(chord_bracket_residual(&e, &res, &angles)?);
            c2 = c2.max(length_reduction_residual(&e, &res, &angles, Mu1Form::CnSn)?);
            closure = closure.max(closure_residual(&e, &res, &curve, t)?);
        }
        pass &= c.destroyed && c1 < 1e-6 && c2 < 1e-7 && closure < 1e-6;
        parts.push(format!(
            "({p},{}) λ = {:.6} amplitude {:.4} floor {:.1e} bracket {c1:.1e} length reduction {c2:.1e}",
            2 * q,
            res.lambda,
            c.amplitude,
            c.noise_floor
        ));
    }
    outcome(pass, parts.join("; "))
}

fn c10_wavefront_oracle() -> Result<Outcome> {
    let curve: Curve64 = SupportCurve::ellipse(1.25, 0.8, 64)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 10);
    let h = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let theta = rng.gen_range(0.0..2.0 * PI);
        let (w, wp, wm) = (wavefront(&curve, theta, 8)?, wavefront(&curve, theta + h, 8)?, wavefront(&curve, theta - h, 8)?);
        for m in 1..=8 {
            let da = (wp.angles[m] - wm.angles[m]) / (2.0 * h);
            let dp = (wp.phis[m] - wm.phis[m]) / (2.0 * h);
            worst = worst
                .max((da - w.d_angles[m]).abs() / w.d_angles[m].abs().max(1.0))
                .max((dp - w.d_phis[m]).abs() / w.d_phis[m].abs().max(1.0));
        }
    }
    outcome(worst < 1e-5, format!("worst relative gap over m ≤ 8, 100 θ: {worst:.2e}"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 10] = [
        ("flow fixed point", c1_flow_fixed_point),
        ("normalization and monotone functionals", c2_normalization),
        ("decay rate", c3_decay_rate),
        ("billiard identities", c4_billiard_identities),
        ("diameter classification", c5_diameters),
        ("constant-width breaking", c6_constant_width_breaking),
        ("NP(4) destruction", c7_np_destruction),
        ("envelope asymptotics", c8_envelope_asymptotics),
        ("Melnikov non-constancy", c9_melnikov),
        ("wavefront derivative oracle", c10_wavefront_oracle),
    ];
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|(_, f)| {
                scope.spawn(move || {
                    let start = Instant::now();
                    let r = f();
                    (r, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });
    let mut failed = 0;
    for (i, ((name, _), joined)) in criteria.iter().zip(results).enumerate() {
        let (pass, detail, secs) = match joined {
            Ok((Ok(o), secs)) => (o.pass, o.detail, secs),
            Ok((Err(e), secs)) => (false, format!("error: {e}"), secs),
            Err(_) => (false, "panicked".to_string(), 0.0),
        };
        if !pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
