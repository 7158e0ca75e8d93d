//! Billiard map on an oval in `(θ, φ)` coordinates: θ is the tangent angle of the bounce
//! point and φ ∈ (0, π) the angle of the outgoing ray measured from `T(θ)` towards the
//! inward normal.

use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, SupportCurve};
use crate::numerics::brent_root;
use crate::scalar::{from_usize, lift_after, lit, wrap_angle, Real};

/// Rays closer than this to the tangent are rejected.
pub const GRAZING_GUARD: f64 = 1e-6;

const SCAN_SAMPLES: usize = 32;

/// Row-major 2×2 matrix.
pub type Mat2<T> = [[T; 2]; 2];

pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

pub fn mat_det<T: Real>(a: &Mat2<T>) -> T {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

pub fn mat_trace<T: Real>(a: &Mat2<T>) -> T {
    a[0][0] + a[1][1]
}

/// A point of the billiard phase cylinder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    pub theta: T,
    pub phi: T,
}

impl<T: Real> PhasePoint<T> {
    /// Wraps θ into `[0, 2π)`; rejects φ within the grazing guard of 0 or π.
    pub fn new(theta: T, phi: T) -> Result<Self> {
        check_phi(phi, 0)?;
        Ok(Self {
            theta: wrap_angle(theta),
            phi,
        })
    }

    /// Outgoing unit direction on `curve`.
    pub fn direction(&self) -> PlanePoint<T> {
        PlanePoint::unit(self.theta + self.phi)
    }
}

fn check_phi<T: Real>(phi: T, bounce: usize) -> Result<()> {
    let guard = lit::<T>(GRAZING_GUARD);
    if !(phi > guard && phi < T::PI() - guard) {
        return Err(Error::Grazing {
            phi: phi.to_f64().unwrap_or(f64::NAN),
            bounce,
        });
    }
    Ok(())
}

/// One bounce from `from` to `to`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BounceRecord<T> {
    pub from: PhasePoint<T>,
    pub to: PhasePoint<T>,
    /// Chord length `l`.
    pub chord: T,
    /// `R(θ) sin φ` at the departure point.
    pub x_in: T,
    /// `R(θ₁) sin φ₁` at the arrival point.
    pub x_out: T,
}

/// Advances `p` by one bounce.
///
/// The far intersection is the root of `s ↦ [X(θ + s) − X(θ)] ∧ v` on `(0, 2π)`, which is
/// positive just after `s = 0` and negative just before `2π`.
pub fn reflect<T: Real>(curve: &SupportCurve<T>, p: PhasePoint<T>) -> Result<BounceRecord<T>> {
    check_phi(p.phi, 0)?;
    let theta = p.theta;
    let x0 = curve.position(theta);
    let v = p.direction();
    let g = |s: T| (curve.position(theta + s) - x0).cross(v);
    let tau = T::TAU();
    let step = tau / from_usize::<T>(SCAN_SAMPLES);

    let mut lo = T::zero();
    let mut hi = tau;
    let mut prev = None;
    for j in 1..SCAN_SAMPLES {
        let s = step * from_usize::<T>(j);
        if g(s) <= T::zero() {
            hi = s;
            lo = prev.unwrap_or(T::zero());
            break;
        }
        prev = Some(s);
        lo = s;
    }
    // the root hides in the first or last scan cell when φ is close to 0 or π
    if lo == T::zero() {
        let mut d = step;
        while g(d) <= T::zero() && d > T::epsilon() {
            d = d * lit(0.5);
        }
        lo = d;
    }
    if hi == tau {
        let mut d = step;
        while g(tau - d) >= T::zero() && d > T::epsilon() {
            d = d * lit(0.5);
        }
        hi = tau - d;
    }
    let s = brent_root("billiard far intersection", g, lo, hi, T::epsilon() * lit(8.0))?;

    let theta1 = theta + s;
    let x1 = curve.position(theta1);
    let t1 = PlanePoint::unit(theta1);
    let phi1 = (-v.dot(t1.perp())).atan2(v.dot(t1));
    check_phi(phi1, 1)?;
    let to = PhasePoint {
        theta: wrap_angle(theta1),
        phi: phi1,
    };
    Ok(BounceRecord {
        from: p,
        to,
        chord: x1.distance(x0),
        x_in: curve.radius(theta) * p.phi.sin(),
        x_out: curve.radius(theta1) * phi1.sin(),
    })
}

/// `steps` consecutive bounces starting at `p`.
pub fn iterate<T: Real>(curve: &SupportCurve<T>, p: PhasePoint<T>, steps: usize) -> Result<Vec<BounceRecord<T>>> {
    let mut out = Vec::with_capacity(steps);
    let mut cur = p;
    for m in 0..steps {
        let rec = reflect(curve, cur).map_err(|e| match e {
            Error::Grazing { phi, bounce } => Error::Grazing { phi, bounce: m + bounce },
            other => other,
        })?;
        cur = rec.to;
        out.push(rec);
    }
    Ok(out)
}

/// Reversing involution `(θ, φ) ↦ (θ, π − φ)`.
pub fn involution<T: Real>(p: PhasePoint<T>) -> PhasePoint<T> {
    PhasePoint {
        theta: p.theta,
        phi: T::PI() - p.phi,
    }
}

/// Derivative of the bounce in `(θ, φ)` coordinates:
/// `(1/x₁)[[l − x₀, l], [l − x₀ − x₁, l − x₁]]`. Its determinant is `x₀/x₁`.
pub fn jacobian<T: Real>(rec: &BounceRecord<T>) -> Mat2<T> {
    let (l, x0, x1) = (rec.chord, rec.x_in, rec.x_out);
    let inv = T::one() / x1;
    [
        [(l - x0) * inv, l * inv],
        [(l - x0 - x1) * inv, (l - x1) * inv],
    ]
}

/// Derivative of the bounce in `(s, −cos φ)` coordinates, where it has unit determinant.
pub fn symplectic_jacobian<T: Real>(curve: &SupportCurve<T>, rec: &BounceRecord<T>) -> Mat2<T> {
    let j = jacobian(rec);
    let (r0, r1) = (curve.radius(rec.from.theta), curve.radius(rec.to.theta));
    let (s0, s1) = (rec.from.phi.sin(), rec.to.phi.sin());
    [
        [r1 * j[0][0] / r0, r1 * j[0][1] / s0],
        [s1 * j[1][0] / r0, s1 * j[1][1] / s0],
    ]
}

/// Chord length between arclength positions and its partial derivatives
/// `(L, ∂L/∂s, ∂L/∂s₁)`, with `−∂L/∂s = cos φ` and `∂L/∂s₁ = cos φ₁`.
pub fn generating_length<T: Real>(curve: &SupportCurve<T>, s: T, s1: T) -> Result<(T, T, T)> {
    let a = curve.theta_at_arclength(s);
    let b = curve.theta_at_arclength(s1);
    generating_length_theta(curve, a, b)
}

/// [`generating_length`] with the endpoints given by tangent angle; the partials are
/// still with respect to arclength.
pub fn generating_length_theta<T: Real>(curve: &SupportCurve<T>, a: T, b: T) -> Result<(T, T, T)> {
    let d = curve.position(b) - curve.position(a);
    let l = d.norm();
    if !(l > lit::<T>(1e-12) * curve.perimeter()) {
        return Err(Error::Coincident(a.to_f64().unwrap_or(f64::NAN)));
    }
    let u = d * (T::one() / l);
    Ok((l, -u.dot(PlanePoint::unit(a)), u.dot(PlanePoint::unit(b))))
}

struct Triple<T> {
    l1: T,
    l2: T,
    sin_in: T,
    sin_out: T,
    k: T,
}

fn triple<T: Real>(curve: &SupportCurve<T>, a: T, b: T, c: T) -> Result<Triple<T>> {
    let (xa, xb, xc) = (curve.position(a), curve.position(b), curve.position(c));
    let (d1, d2) = (xb - xa, xc - xb);
    let (l1, l2) = (d1.norm(), d2.norm());
    if !(l1 > T::zero() && l2 > T::zero()) {
        return Err(Error::Coincident(b.to_f64().unwrap_or(f64::NAN)));
    }
    let n = PlanePoint::unit(b).perp();
    Ok(Triple {
        l1,
        l2,
        sin_in: -(d1 * (T::one() / l1)).dot(n),
        sin_out: (d2 * (T::one() / l2)).dot(n),
        k: T::one() / curve.radius(b),
    })
}

/// Closed-form twist quantity `2 sin φ [sin φ (1/L + 1/L′) + k(s′)]` at the middle point of
/// a triple, with φ the angle of the outgoing chord at `s1`. Positive for every triple.
pub fn twist_positivity<T: Real>(curve: &SupportCurve<T>, s: T, s1: T, s2: T) -> Result<T> {
    let (a, b, c) = (
        curve.theta_at_arclength(s),
        curve.theta_at_arclength(s1),
        curve.theta_at_arclength(s2),
    );
    let t = triple(curve, a, b, c)?;
    let sp = t.sin_out;
    Ok((sp + sp) * (sp * (T::one() / t.l1 + T::one() / t.l2) + t.k))
}

/// `∂²/∂s₁² [L(s, s₁) + L(s₁, s₂)] = sin²α/L + sin²β/L′ − k(sin α + sin β)` where α and β
/// are the incoming and outgoing chord angles at `s1`.
pub fn midpoint_hessian<T: Real>(curve: &SupportCurve<T>, s: T, s1: T, s2: T) -> Result<T> {
    let (a, b, c) = (
        curve.theta_at_arclength(s),
        curve.theta_at_arclength(s1),
        curve.theta_at_arclength(s2),
    );
    let t = triple(curve, a, b, c)?;
    Ok(t.sin_in * t.sin_in / t.l1 + t.sin_out * t.sin_out / t.l2 - t.k * (t.sin_in + t.sin_out))
}

/// Sign-carrying part of `∂/∂θb [L(a, b) + L(b, c)] = R(b)·⟨u_ab − u_bc, T(b)⟩`.
fn midpoint_gradient<T: Real>(curve: &SupportCurve<T>, xa: PlanePoint<T>, xc: PlanePoint<T>, b: T) -> T {
    let xb = curve.position(b);
    let u1 = (xb - xa).normalized();
    let u2 = (xc - xb).normalized();
    (u1 - u2).dot(PlanePoint::unit(b))
}

/// Midpoint `θb` on the counter-clockwise arc from `θa` to `θc` making `(θa, θb, θc)` a
/// reflection triple: the maximizer of `L(a, b) + L(b, c)` on that arc.
pub fn midpoint_solve<T: Real>(curve: &SupportCurve<T>, theta_a: T, theta_c: T) -> Result<T> {
    const SAMPLES: usize = 64;
    let a = theta_a;
    let c = lift_after(theta_c, a);
    let span = c - a;
    let (xa, xc) = (curve.position(a), curve.position(c));
    let total = |b: T| {
        let xb = curve.position(b);
        xb.distance(xa) + xc.distance(xb)
    };
    let at = |i: usize| a + span * from_usize::<T>(i) / from_usize::<T>(SAMPLES);
    let mut best = 1;
    let mut best_v = T::neg_infinity();
    for i in 1..SAMPLES {
        let v = total(at(i));
        if v > best_v {
            best_v = v;
            best = i;
        }
    }
    let edge = span * lit(1e-9);
    let lo = if best == 1 { a + edge } else { at(best - 1) };
    let hi = if best == SAMPLES - 1 { c - edge } else { at(best + 1) };
    let b = brent_root(
        "midpoint gradient",
        |b| midpoint_gradient(curve, xa, xc, b),
        lo,
        hi,
        T::epsilon() * lit(8.0),
    )?;
    Ok(wrap_angle(b))
}

/// Midpoint on the branch through `guess`: the root of the midpoint gradient in the
/// smallest window `guess ± d` (d doubling from 1e-6) that brackets a sign change.
///
/// The reflection-triple set is a graph only locally; when several triples join `θa` and
/// `θc` this picks the one continuing a known orbit.
pub fn midpoint_solve_local<T: Real>(curve: &SupportCurve<T>, theta_a: T, theta_c: T, guess: T) -> Result<T> {
    let (xa, xc) = (curve.position(theta_a), curve.position(theta_c));
    let g = |b: T| midpoint_gradient(curve, xa, xc, b);
    let mut d = lit::<T>(1e-6);
    while d < lit(0.5) {
        let (lo, hi) = (guess - d, guess + d);
        if g(lo) * g(hi) <= T::zero() {
            let b = brent_root("midpoint gradient", g, lo, hi, T::epsilon() * lit(8.0))?;
            return Ok(wrap_angle(b));
        }
        d = d + d;
    }
    Err(Error::Bracket("midpoint gradient"))
}

/// `L(θa, θb*) + L(θb*, θc)` at the solved midpoint, together with `θb*`.
pub fn composed_generating_with_midpoint<T: Real>(curve: &SupportCurve<T>, theta_a: T, theta_c: T) -> Result<(T, T)> {
    let b = midpoint_solve(curve, theta_a, theta_c)?;
    let xb = curve.position(b);
    let v = xb.distance(curve.position(theta_a)) + curve.position(theta_c).distance(xb);
    Ok((v, b))
}

/// Generating function of the squared map obtained by eliminating the midpoint.
pub fn composed_generating<T: Real>(curve: &SupportCurve<T>, theta_a: T, theta_c: T) -> Result<T> {
    composed_generating_with_midpoint(curve, theta_a, theta_c).map(|r| r.0)
}

/// Departure angle at `X(θa)` of the chord towards `X(θb)`.
pub fn chord_angle<T: Real>(curve: &SupportCurve<T>, theta_a: T, theta_b: T) -> T {
    let u = curve.position(theta_b) - curve.position(theta_a);
    let t = PlanePoint::unit(theta_a);
    u.dot(t.perp()).atan2(u.dot(t))
}
