//! Resonant hyperbolic caustics of the elliptic billiard and the first-order Melnikov
//! potential of the curvature-flow deformation along them.
//!
//! Raw ellipse `x²/a² + y²/b² = 1`, foci at `(±c, 0)` with `c² = a² − b²`. The elliptic
//! angle ν of a boundary point is defined by `(x, y) = (a cos ν, b sin ν)`. A caustic is the
//! confocal hyperbola `x²/(a² − λ²) + y²/(b² − λ²) = 1`, `b < λ < a`. In units where `c = 1`
//! the orbit tangent to it is
//!
//! ```text
//! X_j = (A k sn(t + jδ), (−1)^j B dn(t + jδ)),   A = a/c, B = b/c,
//! k² = (a² − λ²)/(a² − b²),   δ = 2 F(asin(b/λ), k),
//! ```
//!
//! so one bounce advances the phase by δ and the rotation number is `δ / 4K(k)`.

use crate::billiard::{iterate, midpoint_solve_local, PhasePoint};
use crate::elliptic::{elliptic_f, elliptic_k, jacobi};
use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, SupportCurve};
use crate::numerics::brent_root;
use crate::scalar::{from_usize, lit, wrap_angle, Real};

/// Ellipse semi-axes with the confocal data derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams<T> {
    pub a: T,
    pub b: T,
    /// Focal half-distance `c = √(a² − b²)`.
    pub focal: T,
    /// Elliptic radius of the boundary: `cosh μ₀ = a/c`, `sinh μ₀ = b/c`.
    pub mu0: T,
}

impl<T: Real> EllipseParams<T> {
    /// Requires `a > b > 0`; the circle has no hyperbolic caustics.
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(b > T::zero()) || !a.is_finite() {
            return Err(Error::invalid("b", "semi-axes must be positive and finite"));
        }
        if !(a > b) {
            return Err(Error::NoHyperbolicCaustics {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
            });
        }
        let focal = ((a - b) * (a + b)).sqrt();
        Ok(Self {
            a,
            b,
            focal,
            mu0: (b / a).atanh(),
        })
    }

    /// Semi-axes in confocal normal form (foci at ±1).
    pub fn normalized(&self) -> (T, T) {
        (self.a / self.focal, self.b / self.focal)
    }

    pub fn point(&self, nu: T) -> PlanePoint<T> {
        let (s, c) = nu.sin_cos();
        PlanePoint::new(self.a * c, self.b * s)
    }

    /// Elliptic angle of a boundary point.
    pub fn elliptic_angle(&self, p: PlanePoint<T>) -> T {
        (p.y / self.b).atan2(p.x / self.a)
    }

    /// Unit tangent at elliptic angle ν, oriented counter-clockwise.
    pub fn tangent(&self, nu: T) -> PlanePoint<T> {
        let (s, c) = nu.sin_cos();
        PlanePoint::new(-self.a * s, self.b * c).normalized()
    }

    /// Tangent angle θ (support-function parameter) of a boundary point.
    pub fn tangent_angle(&self, p: PlanePoint<T>) -> T {
        let n = self.scaled(p);
        wrap_angle(n.y.atan2(n.x) + T::FRAC_PI_2())
    }

    /// `D⁻²X` with `D = diag(a, b)`.
    pub fn scaled(&self, p: PlanePoint<T>) -> PlanePoint<T> {
        PlanePoint::new(p.x / (self.a * self.a), p.y / (self.b * self.b))
    }

    /// Harmonic count resolving the support function to below 1e-17: its Fourier
    /// coefficients decay like `e^{−nη}` with `tanh η = b/a`.
    pub fn harmonic_count(&self) -> usize {
        let eta = self.mu0.to_f64().unwrap_or(1.0).max(1e-3);
        let n = (40.0 / eta / 8.0).ceil() as usize * 8;
        n.clamp(16, 1024)
    }

    /// Spectral support-function representation of the boundary.
    pub fn curve(&self, harmonic_count: usize) -> Result<SupportCurve<T>> {
        SupportCurve::ellipse(self.a, self.b, harmonic_count)
    }
}

/// Modulus `k(λ)` of the hyperbolic caustic with parameter λ.
pub fn caustic_modulus<T: Real>(e: &EllipseParams<T>, lambda: T) -> Result<T> {
    if !(lambda > e.b && lambda < e.a) {
        return Err(Error::invalid("lambda", format!("caustic parameter {lambda} outside ({}, {})", e.b, e.a)));
    }
    Ok(((e.a - lambda) * (e.a + lambda) / (e.focal * e.focal)).sqrt())
}

/// Phase advance per bounce, `δ(λ) = 2 F(asin(b/λ), k)`.
pub fn caustic_period<T: Real>(e: &EllipseParams<T>, lambda: T) -> Result<T> {
    let k = caustic_modulus(e, lambda)?;
    Ok(lit::<T>(2.0) * elliptic_f((e.b / lambda).asin(), k)?)
}

/// Rotation number `δ(λ) / 4K(k(λ))`.
pub fn rotation<T: Real>(e: &EllipseParams<T>, lambda: T) -> Result<T> {
    let k = caustic_modulus(e, lambda)?;
    Ok(caustic_period(e, lambda)? / (lit::<T>(4.0) * elliptic_k(k)?))
}

/// Open interval of rotation numbers realized by hyperbolic caustics: `asin(b/a)/π` as
/// λ → a, and `1/2` (approached logarithmically) as λ → b.
pub fn rotation_range<T: Real>(e: &EllipseParams<T>) -> (T, T) {
    ((e.b / e.a).asin() / T::PI(), lit(0.5))
}

/// Hyperbolic caustic whose tangent orbits are periodic of type `(p, 2q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausticResonance<T> {
    pub lambda: T,
    pub modulus: T,
    pub quarter_period: T,
    /// Phase advance δ per bounce.
    pub period: T,
    /// `ζ = 2K − δ`.
    pub zeta: T,
    pub p: usize,
    pub q: usize,
}

impl<T: Real> CausticResonance<T> {
    pub fn for_lambda(e: &EllipseParams<T>, lambda: T, p: usize, q: usize) -> Result<Self> {
        let modulus = caustic_modulus(e, lambda)?;
        let quarter_period = elliptic_k(modulus)?;
        let period = caustic_period(e, lambda)?;
        Ok(Self {
            lambda,
            modulus,
            quarter_period,
            period,
            zeta: quarter_period + quarter_period - period,
            p,
            q,
        })
    }

    pub fn bounces(&self) -> usize {
        2 * self.q
    }

    pub fn rotation(&self) -> T {
        self.period / (lit::<T>(4.0) * self.quarter_period)
    }

    /// `X_j(t)` in raw coordinates.
    pub fn orbit_point(&self, e: &EllipseParams<T>, t: T, j: usize) -> Result<PlanePoint<T>> {
        let (big_a, big_b) = e.normalized();
        let jf = jacobi(t + from_usize::<T>(j) * self.period, self.modulus)?;
        let sign = if j.is_multiple_of(2) { T::one() } else { -T::one() };
        Ok(PlanePoint::new(big_a * self.modulus * jf.sn, sign * big_b * jf.dn) * e.focal)
    }

    /// The `2q` orbit points at phase `t`.
    pub fn orbit(&self, e: &EllipseParams<T>, t: T) -> Result<Vec<PlanePoint<T>>> {
        (0..self.bounces()).map(|j| self.orbit_point(e, t, j)).collect()
    }

    /// Elliptic angles of the orbit at phase `t`.
    pub fn orbit_angles(&self, e: &EllipseParams<T>, t: T) -> Result<Vec<T>> {
        Ok(self.orbit(e, t)?.into_iter().map(|x| e.elliptic_angle(x)).collect())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Solves `rotation(λ) = p/(2q)` by bisection. `Ok(None)` when the target lies outside the
/// rotation range of hyperbolic caustics.
pub fn resonance_solve<T: Real>(e: &EllipseParams<T>, p: usize, q: usize) -> Result<Option<CausticResonance<T>>> {
    if p == 0 || q == 0 || gcd(p, 2 * q) != 1 {
        return Err(Error::invalid("p", format!("resonance ({p}, {}) is not in lowest terms", 2 * q)));
    }
    let target = from_usize::<T>(p) / from_usize::<T>(2 * q);
    let (lo_rot, hi_rot) = rotation_range(e);
    if !(target > lo_rot && target < hi_rot) {
        return Ok(None);
    }
    let g = |l: T| rotation(e, l).map(|r| r - target);
    // rotation decreases from 1/2 at λ = b⁺ to asin(b/a)/π at λ = a⁻
    let gap = e.a - e.b;
    let mut hi = e.a - gap * lit(1e-12);
    if g(hi)? > T::zero() {
        return Ok(None);
    }
    let mut lo = None;
    let mut off = lit::<T>(0.5);
    while off > lit(1e-15) {
        let l = e.b + gap * off;
        if g(l)? > T::zero() {
            lo = Some(l);
            break;
        }
        hi = l;
        off = off * lit(0.1);
    }
    let Some(mut lo) = lo else {
        return Ok(None);
    };
    for _ in 0..200 {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid)? > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    CausticResonance::for_lambda(e, (lo + hi) * lit(0.5), p, q).map(Some)
}

/// Largest distance between the caustic orbit at phase `t` and the orbit obtained by
/// reflecting `2q` times on `curve` from its first chord.
pub fn closure_residual<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    curve: &SupportCurve<T>,
    t: T,
) -> Result<T> {
    let pts = res.orbit(e, t)?;
    let theta0 = e.tangent_angle(pts[0]);
    let u = pts[1] - pts[0];
    let tan = PlanePoint::unit(theta0);
    let phi = u.dot(tan.perp()).atan2(u.dot(tan));
    let recs = iterate(curve, PhasePoint::new(theta0, phi)?, res.bounces())?;
    let mut worst = T::zero();
    for (j, rec) in recs.iter().enumerate() {
        let x = curve.position(rec.to.theta);
        worst = worst.max(x.distance(pts[(j + 1) % pts.len()]));
    }
    Ok(worst)
}

/// Largest tangency defect of the orbit chords against the caustic hyperbola: the
/// discriminant of the line–conic intersection, scaled by `c²`.
pub fn tangency_residual<T: Real>(e: &EllipseParams<T>, res: &CausticResonance<T>, points: &[PlanePoint<T>]) -> T {
    let alpha = e.a * e.a - res.lambda * res.lambda;
    let beta = e.b * e.b - res.lambda * res.lambda;
    let m = |v: PlanePoint<T>| PlanePoint::new(v.x / alpha, v.y / beta);
    let n = points.len();
    let mut worst = T::zero();
    for j in 0..n {
        let p = points[j];
        let d = (points[(j + 1) % n] - p).normalized();
        let disc = d.dot(m(p)).powi(2) - d.dot(m(d)) * (p.dot(m(p)) - T::one());
        worst = worst.max(disc.abs() * e.focal * e.focal);
    }
    worst
}

/// Denominator convention for μ₁.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mu1Form {
    /// `−ab / (a² cos²ν + b² sin²ν)²`.
    #[default]
    CnSn,
    /// `−ab / (a² cos²ν + sin²ν)²`, the variant without `b²`, kept for comparison.
    NoB,
}

/// First-order deformation `μ₁(ν)` of the elliptic radius under the curvature flow.
pub fn mu1<T: Real>(nu: T, e: &EllipseParams<T>) -> T {
    mu1_with(nu, e, Mu1Form::CnSn)
}

pub fn mu1_with<T: Real>(nu: T, e: &EllipseParams<T>, form: Mu1Form) -> T {
    let (s, c) = nu.sin_cos();
    let bb = match form {
        Mu1Form::CnSn => e.b * e.b,
        Mu1Form::NoB => T::one(),
    };
    let d = e.a * e.a * c * c + bb * s * s;
    -e.a * e.b / (d * d)
}

/// `−ab / (a² cn²(u) + b² sn²(u))²`; equals `mu1(am(u))` and reduces to the angle form at k = 0.
pub fn mu1_jacobi<T: Real>(u: T, k: T, e: &EllipseParams<T>) -> Result<T> {
    let j = jacobi(u, k)?;
    let d = e.a * e.a * j.cn * j.cn + e.b * e.b * j.sn * j.sn;
    Ok(-e.a * e.b / (d * d))
}

/// Tolerance on the reflection law used to accept a list of angles as an orbit.
pub const ORBIT_TOLERANCE: f64 = 1e-6;

/// Orbit vertices and their outgoing unit chord directions.
type Directions<T> = (Vec<PlanePoint<T>>, Vec<PlanePoint<T>>);

/// Unit chord directions `p_j = (X_{j+1} − X_j)/|X_{j+1} − X_j|` of the closed polygon with
/// vertices at elliptic angles `angles`, after checking the reflection law at each vertex.
fn chord_directions<T: Real>(e: &EllipseParams<T>, angles: &[T]) -> Result<Directions<T>> {
    let n = angles.len();
    if n < 2 {
        return Err(Error::invalid("orbit", "need at least two points"));
    }
    let pts: Vec<_> = angles.iter().map(|&v| e.point(v)).collect();
    let dirs: Vec<_> = (0..n).map(|j| (pts[(j + 1) % n] - pts[j]).normalized()).collect();
    let mut defect = T::zero();
    for j in 0..n {
        let d = (dirs[(j + n - 1) % n] - dirs[j]).dot(e.tangent(angles[j]));
        defect = defect.max(d.abs());
    }
    if !(defect < lit(ORBIT_TOLERANCE)) {
        return Err(Error::OpenOrbit(defect.to_f64().unwrap_or(f64::NAN)));
    }
    Ok((pts, dirs))
}

/// `⟨p_{j−1} − p_j, D⁻²X_j⟩` at each vertex of the orbit.
pub fn chord_brackets<T: Real>(e: &EllipseParams<T>, angles: &[T]) -> Result<Vec<T>> {
    let (pts, dirs) = chord_directions(e, angles)?;
    let n = pts.len();
    Ok((0..n)
        .map(|j| (dirs[(j + n - 1) % n] - dirs[j]).dot(e.scaled(pts[j])))
        .collect())
}

/// `max_j |ab ⟨p_{j−1} − p_j, D⁻²X_j⟩ − 2λ|` over a closed caustic orbit.
pub fn chord_bracket_residual<T: Real>(e: &EllipseParams<T>, res: &CausticResonance<T>, angles: &[T]) -> Result<T> {
    check_length(res, angles)?;
    let two_lambda = res.lambda + res.lambda;
    Ok(chord_brackets(e, angles)?
        .into_iter()
        .map(|v| (e.a * e.b * v - two_lambda).abs())
        .fold(T::zero(), T::max))
}

fn check_length<T: Real>(res: &CausticResonance<T>, angles: &[T]) -> Result<()> {
    if angles.len() != res.bounces() {
        return Err(Error::invalid(
            "orbit",
            format!("expected {} points, got {}", res.bounces(), angles.len()),
        ));
    }
    Ok(())
}

/// Deformation field `X₁ = ab μ₁ D⁻²X₀`, the velocity of `X(μ₀ + εμ₁, ν)` in ε.
pub fn deformation<T: Real>(nu: T, e: &EllipseParams<T>, form: Mu1Form) -> PlanePoint<T> {
    e.scaled(e.point(nu)) * (e.a * e.b * mu1_with(nu, e, form))
}

/// First-order length variation `Σ_j ⟨p_j, X₁(ν_{j+1}) − X₁(ν_j)⟩` of the closed polygon.
pub fn first_order_length<T: Real>(e: &EllipseParams<T>, angles: &[T], form: Mu1Form) -> Result<T> {
    let (_, dirs) = chord_directions(e, angles)?;
    let n = angles.len();
    Ok((0..n)
        .map(|j| dirs[j].dot(deformation(angles[(j + 1) % n], e, form) - deformation(angles[j], e, form)))
        .sum())
}

/// `|Σ L₁ − 2λ Σ μ₁|` along a closed caustic orbit.
pub fn length_reduction_residual<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    angles: &[T],
    form: Mu1Form,
) -> Result<T> {
    check_length(res, angles)?;
    let direct = first_order_length(e, angles, form)?;
    let reduced: T = angles.iter().map(|&v| mu1_with(v, e, form)).sum::<T>() * (res.lambda + res.lambda);
    Ok((direct - reduced).abs())
}

/// `W₁(t) = 2λ Σ_{j<2q} μ₁(ν_j)` with every orbit point taken from the caustic.
pub fn melnikov_potential_caustic<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    t: T,
    form: Mu1Form,
) -> Result<T> {
    let s: T = res.orbit_angles(e, t)?.into_iter().map(|v| mu1_with(v, e, form)).sum();
    Ok((res.lambda + res.lambda) * s)
}

/// Odd-index points of the orbit at phase `t`: `Ψ₀(ν_{2j}, ν_{2j+2})`, the critical point of
/// `L(X_{2j}, ·) + L(·, X_{2j+2})` on `curve` eliminated between consecutive even caustic points.
///
/// Several reflection triples can join the same pair of even points (for `q = 2` both odd
/// points of the orbit do), so the branch is the one through the odd caustic point.
pub fn odd_midpoints<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    curve: &SupportCurve<T>,
    t: T,
) -> Result<Vec<PlanePoint<T>>> {
    let pts = res.orbit(e, t)?;
    let n = pts.len();
    (0..res.q)
        .map(|j| {
            let (ta, tc) = (e.tangent_angle(pts[2 * j]), e.tangent_angle(pts[(2 * j + 2) % n]));
            let seed = e.tangent_angle(pts[2 * j + 1]);
            midpoint_solve_local(curve, ta, tc, seed)
                .map(|b| curve.position(b))
                .map_err(|err| Error::Midpoint {
                    index: 2 * j + 1,
                    source: Box::new(err),
                })
        })
        .collect()
}

/// Subharmonic Melnikov potential `W₁(t) = 2λ [Σ μ₁(ν_{2j}) + Σ μ₁(Ψ₀(ν_{2j}, ν_{2j+2}))]`.
pub fn melnikov_potential<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    curve: &SupportCurve<T>,
    t: T,
    form: Mu1Form,
) -> Result<T> {
    let mut s = T::zero();
    for j in 0..res.q {
        s = s + mu1_with(e.elliptic_angle(res.orbit_point(e, t, 2 * j)?), e, form);
    }
    for x in odd_midpoints(e, res, curve, t)? {
        s = s + mu1_with(e.elliptic_angle(x), e, form);
    }
    Ok((res.lambda + res.lambda) * s)
}

/// `W₁` sampled over one shift period with its non-constancy verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct MelnikovCurve<T> {
    /// `(t, W₁(t))` on the uniform grid `t_i = iδ/n`.
    pub samples: Vec<(T, T)>,
    /// `max − min` of the samples.
    pub amplitude: T,
    /// Largest change of the samples when the boundary resolution is doubled.
    pub resolution_floor: T,
    /// Change of the amplitude when every other sample is dropped.
    pub sampling_floor: T,
    pub noise_floor: T,
    /// `amplitude > 10 × noise_floor`.
    pub destroyed: bool,
}

fn spread<T: Real>(vals: impl Iterator<Item = T>) -> T {
    let (lo, hi) = vals.fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

pub fn melnikov_curve<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    samples: usize,
) -> Result<MelnikovCurve<T>> {
    melnikov_curve_with(e, res, samples, e.harmonic_count(), Mu1Form::CnSn)
}

pub fn melnikov_curve_with<T: Real>(
    e: &EllipseParams<T>,
    res: &CausticResonance<T>,
    samples: usize,
    harmonic_count: usize,
    form: Mu1Form,
) -> Result<MelnikovCurve<T>> {
    if samples < 16 {
        return Err(Error::invalid("samples", "need at least 16 samples"));
    }
    let coarse = e.curve(harmonic_count)?;
    let fine = e.curve(2 * harmonic_count)?;
    let mut pts = Vec::with_capacity(samples);
    let mut resolution_floor = T::zero();
    for i in 0..samples {
        let t = res.period * from_usize::<T>(i) / from_usize::<T>(samples);
        let w = melnikov_potential(e, res, &coarse, t, form)?;
        let w2 = melnikov_potential(e, res, &fine, t, form)?;
        resolution_floor = resolution_floor.max((w - w2).abs());
        pts.push((t, w2));
    }
    let amplitude = spread(pts.iter().map(|p| p.1));
    let half = spread(pts.iter().step_by(2).map(|p| p.1));
    let sampling_floor = (amplitude - half).abs();
    let noise_floor = resolution_floor.max(sampling_floor);
    Ok(MelnikovCurve {
        samples: pts,
        amplitude,
        resolution_floor,
        sampling_floor,
        noise_floor,
        destroyed: amplitude > lit::<T>(10.0) * noise_floor,
    })
}

/// λ at which the rotation number equals `target`, without the resonance bookkeeping.
pub fn lambda_for_rotation<T: Real>(e: &EllipseParams<T>, target: T) -> Result<T> {
    let gap = e.a - e.b;
    brent_root(
        "caustic rotation",
        |l| rotation(e, l).map(|r| r - target).unwrap_or(T::nan()),
        e.b + gap * lit(1e-12),
        e.a - gap * lit(1e-12),
        T::epsilon() * e.a,
    )
}
