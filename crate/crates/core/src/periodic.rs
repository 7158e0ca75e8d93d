//! Period-two orbits (diameters): location, classification and continuation along the
//! flow.
//!
//! A diameter through `X(θ)` and `X(θ + π)` is a root of
//! `f(θ) = ⟨T(θ), X(θ + π) − X(θ)⟩ = −h′(θ + π) − h′(θ)`.

use crate::billiard::{jacobian, mat_mul, mat_trace, reflect, PhasePoint};
use crate::error::{Error, Result};
use crate::flow::FlowTrajectory;
use crate::geometry::SupportCurve;
use crate::numerics::{safeguarded_newton, GaussLegendre};
use crate::scalar::{lit, Real};

/// Linear stability class of a period-two orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitClass {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

impl OrbitClass {
    pub fn as_str(self) -> &'static str {
        match self {
            OrbitClass::Hyperbolic => "hyperbolic",
            OrbitClass::Elliptic => "elliptic",
            OrbitClass::Parabolic => "parabolic",
        }
    }
}

impl std::fmt::Display for OrbitClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A located diameter, represented by its endpoint with θ ∈ [0, π).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiameterOrbit<T> {
    pub theta: T,
    pub length: T,
    pub klass: OrbitClass,
    /// `|f|` at the refined root.
    pub residual: T,
    /// `f′` at the root, `ℓ − R(θ) − R(θ + π)`.
    pub f_prime: T,
}

/// Result of a diameter search.
#[derive(Debug, Clone, PartialEq)]
pub enum DiameterSet<T> {
    /// `f` vanishes on the whole grid (constant width).
    Continuum,
    Orbits(Vec<DiameterOrbit<T>>),
}

impl<T> DiameterSet<T> {
    pub fn orbits(&self) -> &[DiameterOrbit<T>] {
        match self {
            DiameterSet::Continuum => &[],
            DiameterSet::Orbits(v) => v,
        }
    }

    pub fn is_continuum(&self) -> bool {
        matches!(self, DiameterSet::Continuum)
    }
}

/// `f(θ) = −h′(θ + π) − h′(θ)`.
pub fn pair_function<T: Real>(curve: &SupportCurve<T>, theta: T) -> T {
    -curve.eval(theta + T::PI()).dh - curve.eval(theta).dh
}

/// `f′(θ) = h(θ) + h(θ + π) − R(θ) − R(θ + π)`.
pub fn pair_derivative<T: Real>(curve: &SupportCurve<T>, theta: T) -> T {
    let (g0, g1) = (curve.eval(theta), curve.eval(theta + T::PI()));
    g0.h + g1.h - g0.radius - g1.radius
}

fn pair_both<T: Real>(curve: &SupportCurve<T>, theta: T) -> (T, T) {
    let (g0, g1) = (curve.eval(theta), curve.eval(theta + T::PI()));
    (-g0.dh - g1.dh, g0.h + g1.h - g0.radius - g1.radius)
}

/// Tolerance below which `|f′|` counts as parabolic.
pub fn parabolic_tolerance<T: Real>(length: T) -> T {
    lit::<T>(1e-8) * (T::one() + length.abs())
}

/// Classification from `f′` and the product test `(ℓ − R₀)(ℓ − R₁)`.
pub fn classify<T: Real>(curve: &SupportCurve<T>, theta: T) -> (OrbitClass, T, T) {
    let (g0, g1) = (curve.eval(theta), curve.eval(theta + T::PI()));
    let length = g0.h + g1.h;
    let fp = length - g0.radius - g1.radius;
    let klass = if fp.abs() <= parabolic_tolerance(length) {
        OrbitClass::Parabolic
    } else if fp > T::zero() {
        OrbitClass::Hyperbolic
    } else if (length - g0.radius) * (length - g1.radius) > T::zero() {
        OrbitClass::Elliptic
    } else {
        OrbitClass::Hyperbolic
    };
    (klass, length, fp)
}

/// Half-trace of the two-bounce Jacobian along the diameter at `theta`.
pub fn diameter_half_trace<T: Real>(curve: &SupportCurve<T>, theta: T) -> Result<T> {
    let r1 = reflect(curve, PhasePoint::new(theta, T::FRAC_PI_2())?)?;
    let r2 = reflect(curve, r1.to)?;
    let m = mat_mul(&jacobian(&r2), &jacobian(&r1));
    Ok(mat_trace(&m) / (T::one() + T::one()))
}

/// Class read off the trace of the linearized square map.
pub fn class_from_half_trace<T: Real>(half_trace: T, tol: T) -> OrbitClass {
    if (half_trace.abs() - T::one()).abs() <= tol {
        OrbitClass::Parabolic
    } else if half_trace.abs() > T::one() {
        OrbitClass::Hyperbolic
    } else {
        OrbitClass::Elliptic
    }
}

fn orbit_at<T: Real>(curve: &SupportCurve<T>, theta: T) -> DiameterOrbit<T> {
    let (klass, length, f_prime) = classify(curve, theta);
    DiameterOrbit {
        theta,
        length,
        klass,
        residual: pair_function(curve, theta).abs(),
        f_prime,
    }
}

/// All diameters, one representative per antipodal pair, sorted by θ ∈ [0, π).
pub fn find_diameters<T: Real>(curve: &SupportCurve<T>) -> DiameterSet<T> {
    let m = curve.grid_size();
    let half = m / 2;
    let nodes = curve.grid().nodes();
    let mut values: Vec<T> = (0..=half)
        .map(|j| {
            let t = if j == half { T::PI() } else { nodes[j] };
            pair_function(curve, t)
        })
        .collect();
    let worst = values.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    if worst < lit::<T>(1e-9) * curve.perimeter() {
        return DiameterSet::Continuum;
    }
    let node_zero = lit::<T>(1e-13) * (T::one() + worst);
    let theta_of = |j: usize| if j == half { T::PI() } else { nodes[j] };
    let mut roots: Vec<T> = Vec::new();
    for v in values.iter_mut() {
        if v.abs() <= node_zero {
            *v = T::zero();
        }
    }
    for j in 0..=half {
        if values[j] == T::zero() {
            roots.push(theta_of(j));
        }
    }
    for j in 0..half {
        let (a, b) = (values[j], values[j + 1]);
        if a != T::zero() && b != T::zero() && (a > T::zero()) != (b > T::zero()) {
            let (lo, hi) = (theta_of(j), theta_of(j + 1));
            let r = safeguarded_newton(
                "diameter root",
                |t| pair_both(curve, t),
                lo,
                hi,
                (lo + hi) / (T::one() + T::one()),
                T::epsilon() * lit(16.0),
            );
            if let Ok(r) = r {
                roots.push(r);
            }
        }
    }
    let pi = T::PI();
    let mut reps: Vec<T> = roots
        .into_iter()
        .map(|r| {
            let w = r - (r / pi).floor() * pi;
            if w >= pi { w - pi } else { w }
        })
        .collect();
    reps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let dup = lit::<T>(1e-9);
    let mut unique: Vec<T> = Vec::new();
    for r in reps {
        if unique.last().is_some_and(|u| (r - *u).abs() < dup) {
            continue;
        }
        unique.push(r);
    }
    if unique.len() > 1 && (unique[0] + pi - *unique.last().unwrap()).abs() < dup {
        unique.pop();
    }
    DiameterSet::Orbits(unique.into_iter().map(|t| orbit_at(curve, t)).collect())
}

/// `k′ = −R′/R²`.
fn dcurvature<T: Real>(curve: &SupportCurve<T>, theta: T) -> T {
    curve.eval(theta).dcurvature()
}

/// Forcing term `k′(θ + π) + k′(θ)` of the evolution of `f`.
pub fn pair_forcing<T: Real>(curve: &SupportCurve<T>, theta: T) -> T {
    dcurvature(curve, theta + T::PI()) + dcurvature(curve, theta)
}

/// `∂f/∂t = f + k′(θ + π) + k′(θ)` under the normalized flow.
pub fn f_time_derivative<T: Real>(curve: &SupportCurve<T>, theta: T) -> T {
    pair_function(curve, theta) + pair_forcing(curve, theta)
}

/// Integral over `[a, b]` of the quadratic through three samples (two-point Gauss is exact).
fn quadratic_integral<T: Real>(xs: [T; 3], fs: [T; 3], a: T, b: T) -> T {
    let gl = GaussLegendre::<T>::new(2);
    let lagrange = |x: T| {
        let mut s = T::zero();
        for i in 0..3 {
            let mut w = fs[i];
            for j in 0..3 {
                if i != j {
                    w = w * (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            s = s + w;
        }
        s
    };
    gl.integrate(a, b, 1, lagrange)
}

/// Piecewise-quadratic (Simpson-type) integral of samples on a possibly non-uniform grid.
pub fn simpson<T: Real>(xs: &[T], fs: &[T]) -> T {
    let n = xs.len();
    match n {
        0 | 1 => T::zero(),
        2 => (xs[1] - xs[0]) * (fs[0] + fs[1]) / (T::one() + T::one()),
        _ => {
            let mut total = T::zero();
            let mut i = 0;
            while i + 2 < n {
                total = total
                    + quadratic_integral([xs[i], xs[i + 1], xs[i + 2]], [fs[i], fs[i + 1], fs[i + 2]], xs[i], xs[i + 2]);
                i += 2;
            }
            if i + 1 < n {
                let j = n - 3;
                total = total + quadratic_integral([xs[j], xs[j + 1], xs[j + 2]], [fs[j], fs[j + 1], fs[j + 2]], xs[n - 2], xs[n - 1]);
            }
            total
        }
    }
}

fn snapshot_index<T: Real>(traj: &FlowTrajectory<T>, t: T) -> Result<usize> {
    let (start, end) = (traj.first().t, traj.last().t);
    let i = traj.nearest(t);
    let slack = lit::<T>(1e-9) * (T::one() + t.abs());
    if t < start - slack || t > end + slack || (traj.states[i].t - t).abs() > slack {
        return Err(Error::OutsideSpan {
            t: t.to_f64().unwrap_or(f64::NAN),
            start: start.to_f64().unwrap_or(f64::NAN),
            end: end.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(i)
}

/// `f(t, θ)` from its value at `t0` by the variation-of-constants formula
/// `f(t) = e^{t−t₀} f(t₀) + e^{t} ∫_{t₀}^{t} e^{−s}[k′(s, θ + π) + k′(s, θ)] ds`,
/// integrated over the trajectory snapshots. Both times must be snapshot times.
pub fn integrated_f<T: Real>(traj: &FlowTrajectory<T>, theta: T, t0: T, t: T) -> Result<T> {
    let i0 = snapshot_index(traj, t0)?;
    let i1 = snapshot_index(traj, t)?;
    let (lo, hi) = (i0.min(i1), i0.max(i1));
    let base = traj.states[i0].t;
    let xs: Vec<T> = traj.states[lo..=hi].iter().map(|s| s.t - base).collect();
    let fs: Vec<T> = traj.states[lo..=hi]
        .iter()
        .zip(&xs)
        .map(|(s, x)| (-*x).exp() * pair_forcing(&s.curve, theta))
        .collect();
    let mut integral = simpson(&xs, &fs);
    if i1 < i0 {
        integral = -integral;
    }
    let f0 = pair_function(&traj.states[i0].curve, theta);
    let dt = traj.states[i1].t - base;
    Ok(dt.exp() * (f0 + integral))
}

/// How a continued branch ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchEnd {
    /// Reached the last snapshot.
    Survived,
    /// Hit a parabolic point where `f′` vanishes; the root merges with a neighbour.
    Collided,
    /// The corrector failed to reconverge.
    LostRoot,
}

impl BranchEnd {
    pub fn as_str(self) -> &'static str {
        match self {
            BranchEnd::Survived => "survived",
            BranchEnd::Collided => "collided",
            BranchEnd::LostRoot => "lost_root",
        }
    }
}

/// One point of a continued branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample<T> {
    pub t: T,
    pub theta: T,
    pub length: T,
    pub f_prime: T,
    pub klass: OrbitClass,
}

/// A diameter followed across the snapshots of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct DiameterBranch<T> {
    pub samples: Vec<BranchSample<T>>,
    pub terminal_event: BranchEnd,
}

impl<T: Real> DiameterBranch<T> {
    /// Times at which the class differs from the previous sample.
    pub fn class_changes(&self) -> Vec<(T, OrbitClass, OrbitClass)> {
        self.samples
            .windows(2)
            .filter(|w| w[0].klass != w[1].klass)
            .map(|w| (w[1].t, w[0].klass, w[1].klass))
            .collect()
    }
}

/// Largest θ change accepted between consecutive snapshots.
pub const CONTINUATION_STEP_BOUND: f64 = 0.25;

fn sample_at<T: Real>(curve: &SupportCurve<T>, t: T, theta: T) -> BranchSample<T> {
    let (klass, length, f_prime) = classify(curve, theta);
    BranchSample {
        t,
        theta,
        length,
        f_prime,
        klass,
    }
}

/// Follows `seed` (a root at the first snapshot) through the trajectory with an Euler
/// predictor `dθ/dt = −f_t/f′` and a bracketed Newton corrector at every snapshot.
pub fn continue_branch<T: Real>(traj: &FlowTrajectory<T>, seed: &DiameterOrbit<T>) -> DiameterBranch<T> {
    let first = &traj.states[0];
    let mut samples = vec![sample_at(&first.curve, first.t, seed.theta)];
    let bound = lit::<T>(CONTINUATION_STEP_BOUND);
    for w in traj.states.windows(2) {
        let last = *samples.last().expect("seeded");
        if last.klass == OrbitClass::Parabolic {
            return DiameterBranch {
                samples,
                terminal_event: BranchEnd::Collided,
            };
        }
        let dt = w[1].t - w[0].t;
        let slope = -f_time_derivative(&w[0].curve, last.theta) / last.f_prime;
        let predicted = last.theta + dt * slope;
        let curve = &w[1].curve;
        let mut radius = (predicted - last.theta).abs().max(lit(1e-3));
        let mut found = None;
        while radius <= bound {
            let (lo, hi) = (predicted - radius, predicted + radius);
            if let Ok(r) = safeguarded_newton(
                "diameter continuation",
                |t| pair_both(curve, t),
                lo,
                hi,
                predicted,
                T::epsilon() * lit(16.0),
            ) {
                found = Some(r);
                break;
            }
            radius = radius * lit(2.0);
        }
        match found {
            Some(theta) if (theta - last.theta).abs() <= bound => {
                samples.push(sample_at(curve, w[1].t, theta));
            }
            _ => {
                return DiameterBranch {
                    samples,
                    terminal_event: BranchEnd::LostRoot,
                }
            }
        }
    }
    let end = if samples.last().is_some_and(|s| s.klass == OrbitClass::Parabolic) {
        BranchEnd::Collided
    } else {
        BranchEnd::Survived
    };
    DiameterBranch {
        samples,
        terminal_event: end,
    }
}

/// Branches for every diameter of the first snapshot; empty for a continuum.
pub fn continue_all<T: Real>(traj: &FlowTrajectory<T>) -> Vec<DiameterBranch<T>> {
    match find_diameters(&traj.states[0].curve) {
        DiameterSet::Continuum => Vec::new(),
        DiameterSet::Orbits(v) => v.iter().map(|o| continue_branch(traj, o)).collect(),
    }
}

/// `‖E(θ + π) − E(θ)‖ = √(f² + f′²)` at a root of `f`; zero exactly for parabolic orbits.
pub fn parabolic_witness<T: Real>(curve: &SupportCurve<T>, theta: T) -> Result<T> {
    let f = pair_function(curve, theta);
    if f.abs() > lit::<T>(1e-8) * (T::one() + curve.width(theta)) {
        return Err(Error::NotARoot {
            theta: theta.to_f64().unwrap_or(f64::NAN),
            residual: f.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(curve.evolute(theta + T::PI()).distance(curve.evolute(theta)))
}
