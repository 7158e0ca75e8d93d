//! Normal periodic orbits: iteration of the orthogonal wavefront `Γ = {φ = π/2}`, its
//! focusing envelopes and the evolute criteria that rule out `NP(2n)`.

use crate::billiard::{jacobian, reflect, PhasePoint};
use crate::error::{Error, Result};
use crate::geometry::{PlanePoint, SupportCurve};
use crate::numerics::{brent_root, golden_min, safeguarded_newton};
use crate::scalar::{from_usize, lift_after, lit, wrap_angle, Real};

/// Default bounce limit.
pub const MAX_BOUNCES: usize = 64;

/// `B^m(θ, π/2)` together with its θ-derivative and the chord data along the way.
///
/// Index `j` of each vector refers to bounce point `j`, with `j = 0` the start.
/// `angles` are unwrapped: `angles[j+1] ∈ (angles[j], angles[j] + 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefrontState<T> {
    pub m: usize,
    pub angles: Vec<T>,
    pub phis: Vec<T>,
    /// `A′_j`.
    pub d_angles: Vec<T>,
    /// `φ′_j`.
    pub d_phis: Vec<T>,
    /// `l_j = ‖X(A_{j+1}) − X(A_j)‖`, length `m`.
    pub chords: Vec<T>,
    /// `x_j = R(A_j) sin φ_j`.
    pub x_values: Vec<T>,
}

impl<T: Real> WavefrontState<T> {
    /// `A_m` (unwrapped).
    pub fn angle(&self) -> T {
        self.angles[self.m]
    }

    pub fn phi(&self) -> T {
        self.phis[self.m]
    }

    pub fn d_angle(&self) -> T {
        self.d_angles[self.m]
    }

    pub fn d_phi(&self) -> T {
        self.d_phis[self.m]
    }
}

/// Iterates `m` bounces from `(θ, π/2)`, propagating `(A′, φ′)` from `(1, 0)` through the
/// bounce Jacobians.
pub fn wavefront<T: Real>(curve: &SupportCurve<T>, theta: T, m: usize) -> Result<WavefrontState<T>> {
    wavefront_limited(curve, theta, m, MAX_BOUNCES)
}

/// [`wavefront`] with an explicit bounce limit.
pub fn wavefront_limited<T: Real>(curve: &SupportCurve<T>, theta: T, m: usize, limit: usize) -> Result<WavefrontState<T>> {
    if m > limit {
        return Err(Error::TooManyBounces { m, limit });
    }
    let start = wrap_angle(theta);
    let mut s = WavefrontState {
        m,
        angles: vec![start],
        phis: vec![T::FRAC_PI_2()],
        d_angles: vec![T::one()],
        d_phis: vec![T::zero()],
        chords: Vec::with_capacity(m),
        x_values: vec![curve.radius(start)],
    };
    let mut p = PhasePoint {
        theta: start,
        phi: T::FRAC_PI_2(),
    };
    for j in 0..m {
        let rec = reflect(curve, p).map_err(|e| match e {
            Error::Grazing { phi, .. } => Error::Grazing { phi, bounce: j + 1 },
            other => other,
        })?;
        let db = jacobian(&rec);
        let (da, dp) = (s.d_angles[j], s.d_phis[j]);
        s.d_angles.push(db[0][0] * da + db[0][1] * dp);
        s.d_phis.push(db[1][0] * da + db[1][1] * dp);
        s.angles.push(lift_after(rec.to.theta, s.angles[j]));
        s.phis.push(rec.to.phi);
        s.chords.push(rec.chord);
        s.x_values.push(rec.x_out);
        p = rec.to;
    }
    Ok(s)
}

/// Closed form `A₁′(θ) = −(ℓ − R(θ)) / (R(A₁)⟨T(A₁), T(θ)⟩)` with ℓ the normal chord.
pub fn a1_derivative<T: Real>(curve: &SupportCurve<T>, theta: T) -> Result<T> {
    let w = wavefront(curve, theta, 1)?;
    let a1 = w.angles[1];
    let dot = PlanePoint::unit(a1).dot(PlanePoint::unit(theta));
    assert!(dot < T::zero(), "normal chord meets the far side transversally");
    Ok(-(w.chords[0] - curve.radius(theta)) / (curve.radius(a1) * dot))
}

/// `β_m = φ′_m / A′_m` through the recursion
/// `β_m = 1 − x_m(1 + β_{m−1}) / (l_{m−1} − x_{m−1} + l_{m−1}β_{m−1})`, `β₀ = 0`.
pub fn beta<T: Real>(curve: &SupportCurve<T>, theta: T, m: usize) -> Result<T> {
    let w = wavefront(curve, theta, m)?;
    beta_from(&w, m).map_err(|_| Error::WavefrontCritical {
        m,
        theta: theta.to_f64().unwrap_or(f64::NAN),
    })
}

/// β values `β_0..=β_m` from an existing wavefront.
pub fn beta_sequence<T: Real>(w: &WavefrontState<T>) -> Result<Vec<T>> {
    let mut out = vec![T::zero()];
    for j in 1..=w.m {
        let b = out[j - 1];
        let (l, x0, x1) = (w.chords[j - 1], w.x_values[j - 1], w.x_values[j]);
        let den = l - x0 + l * b;
        if den == T::zero() {
            return Err(Error::WavefrontCritical {
                m: j,
                theta: w.angles[0].to_f64().unwrap_or(f64::NAN),
            });
        }
        out.push(T::one() - x1 * (T::one() + b) / den);
    }
    Ok(out)
}

fn beta_from<T: Real>(w: &WavefrontState<T>, m: usize) -> Result<T> {
    Ok(beta_sequence(w)?[m])
}

/// Focusing point of the `m`-times reflected orthogonal wavefront.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePoint<T> {
    /// NaN coordinates when `singular`.
    pub point: PlanePoint<T>,
    pub m: usize,
    /// Signed distance to the boundary, positive inside; NaN when `singular`.
    pub inside_margin: T,
    /// `A′_m + φ′_m` vanished: the reflected rays are parallel to first order.
    pub singular: bool,
}

/// `E_m = X(A_m) + x_m A′_m / (A′_m + φ′_m) · v_{φ_m}`; `E_0` is the evolute.
pub fn envelope<T: Real>(curve: &SupportCurve<T>, theta: T, m: usize) -> Result<EnvelopePoint<T>> {
    let w = wavefront(curve, theta, m)?;
    Ok(envelope_from(curve, &w, m))
}

/// Envelope point `E_j` for any `j ≤ w.m`.
pub fn envelope_from<T: Real>(curve: &SupportCurve<T>, w: &WavefrontState<T>, j: usize) -> EnvelopePoint<T> {
    let (da, dp) = (w.d_angles[j], w.d_phis[j]);
    let den = da + dp;
    if den.abs() < lit::<T>(1e-10) * (T::one() + da.abs()) {
        return EnvelopePoint {
            point: PlanePoint::new(T::nan(), T::nan()),
            m: j,
            inside_margin: T::nan(),
            singular: true,
        };
    }
    let a = w.angles[j];
    let dir = PlanePoint::unit(a + w.phis[j]);
    let point = curve.position(a) + dir * (w.x_values[j] * da / den);
    EnvelopePoint {
        point,
        m: j,
        inside_margin: curve.interior_margin(point),
        singular: false,
    }
}

/// Whether the evolute lies strictly inside the curve, with the smallest interior margin
/// over the evolute.
pub fn evolute_containment<T: Real>(curve: &SupportCurve<T>) -> (bool, T) {
    let nodes = curve.grid().nodes();
    let margin = |t: T| curve.interior_margin(curve.evolute(t));
    let mut best = (T::infinity(), T::zero());
    for t in &nodes {
        let v = margin(*t);
        if v < best.0 {
            best = (v, *t);
        }
    }
    let step = T::TAU() / from_usize::<T>(nodes.len());
    let (_, refined) = golden_min(margin, best.1 - step, best.1 + step, T::epsilon().sqrt() * lit(1e-2));
    let m = refined.min(best.0);
    (m > T::zero(), m)
}

/// Outcome of a diffeomorphism scan of `θ ↦ A_m(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffeoCertificate<T> {
    pub ok: bool,
    pub min_abs_da: T,
    /// A θ where some `A′_m` vanishes, when not ok.
    pub witness: Option<T>,
    /// The step at which the witness was found.
    pub witness_m: Option<usize>,
}

/// Scans `A′_m(θ)` for `1 ≤ m ≤ j` over `samples` equispaced θ. The certificate holds iff
/// every `A′_m` stays positive; otherwise a zero is located by bisection.
pub fn diffeo_certificate_with<T: Real>(curve: &SupportCurve<T>, j: usize, samples: usize) -> Result<DiffeoCertificate<T>> {
    let thetas: Vec<T> = (0..samples)
        .map(|i| T::TAU() * from_usize::<T>(i) / from_usize::<T>(samples))
        .collect();
    let waves = thetas
        .iter()
        .map(|t| wavefront(curve, *t, j))
        .collect::<Result<Vec<_>>>()?;
    let mut min_abs = T::infinity();
    let mut min_at = (0usize, 1usize);
    for (i, w) in waves.iter().enumerate() {
        for m in 1..=j {
            let v = w.d_angles[m].abs();
            if v < min_abs {
                min_abs = v;
                min_at = (i, m);
            }
        }
    }
    for m in 1..=j {
        for i in 0..samples {
            let (a, b) = (waves[i].d_angles[m], waves[(i + 1) % samples].d_angles[m]);
            if (a > T::zero()) != (b > T::zero()) {
                let (lo, hi) = (thetas[i], thetas[i] + T::TAU() / from_usize::<T>(samples));
                let f = |t: T| wavefront(curve, t, m).map(|w| w.d_angles[m]).unwrap_or(T::nan());
                let witness = if a == T::zero() {
                    lo
                } else {
                    brent_root("A′ zero", f, lo, hi, T::epsilon().sqrt() * lit(1e-4)).unwrap_or(lo)
                };
                return Ok(DiffeoCertificate {
                    ok: false,
                    min_abs_da: T::zero(),
                    witness: Some(wrap_angle(witness)),
                    witness_m: Some(m),
                });
            }
        }
    }
    // refine the smallest value between neighbouring samples
    let (i, m) = min_at;
    let step = T::TAU() / from_usize::<T>(samples);
    let centre = thetas[i];
    let (_, refined) = golden_min(
        |t| wavefront(curve, t, m).map(|w| w.d_angles[m].abs()).unwrap_or(T::infinity()),
        centre - step,
        centre + step,
        T::epsilon().sqrt() * lit(1e-2),
    );
    Ok(DiffeoCertificate {
        ok: true,
        min_abs_da: min_abs.min(refined),
        witness: None,
        witness_m: None,
    })
}

/// [`diffeo_certificate_with`] on a scan of `max(grid_size, 512)` angles.
pub fn diffeo_certificate<T: Real>(curve: &SupportCurve<T>, j: usize) -> Result<DiffeoCertificate<T>> {
    diffeo_certificate_with(curve, j, curve.grid_size().max(512))
}

/// A normal orbit: perpendicular at `theta0` and again after `n` bounces at `theta1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalOrbit<T> {
    pub theta0: T,
    pub theta1: T,
    pub n: usize,
    /// `|φ_n(θ₀) − π/2|`.
    pub residual: T,
    /// Some intermediate bounce is already perpendicular, so this repeats a shorter orbit.
    pub reducible: bool,
}

/// Result of a normal-orbit search.
#[derive(Debug, Clone, PartialEq)]
pub enum NormalOrbitSet<T> {
    /// `φ_n − π/2` vanishes on the whole scan.
    Continuum,
    Orbits(Vec<NormalOrbit<T>>),
}

impl<T: Real> NormalOrbitSet<T> {
    pub fn orbits(&self) -> &[NormalOrbit<T>] {
        match self {
            NormalOrbitSet::Continuum => &[],
            NormalOrbitSet::Orbits(v) => v,
        }
    }

    /// Orbits that are not repetitions of shorter ones.
    pub fn irreducible(&self) -> Vec<NormalOrbit<T>> {
        self.orbits().iter().filter(|o| !o.reducible).copied().collect()
    }

    pub fn is_continuum(&self) -> bool {
        matches!(self, NormalOrbitSet::Continuum)
    }
}

/// Tolerance on `|φ − π/2|` for perpendicular hits.
pub const PERPENDICULAR_TOLERANCE: f64 = 1e-7;

/// Roots of `g_n(θ) = φ_n(θ) − π/2` over a scan of `samples` angles, refined by Newton
/// with the propagated `φ′_n`. Each orbit is reported once (the traversal from `θ₁` back to
/// `θ₀` is the same orbit).
pub fn np_detect_with<T: Real>(curve: &SupportCurve<T>, n: usize, samples: usize) -> Result<NormalOrbitSet<T>> {
    if n == 0 || n > MAX_BOUNCES {
        return Err(Error::TooManyBounces { m: n, limit: MAX_BOUNCES });
    }
    let step = T::TAU() / from_usize::<T>(samples);
    let thetas: Vec<T> = (0..samples).map(|i| step * from_usize::<T>(i)).collect();
    let g: Vec<T> = thetas
        .iter()
        .map(|t| wavefront(curve, *t, n).map(|w| w.phi() - T::FRAC_PI_2()))
        .collect::<Result<_>>()?;
    let worst = g.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    if worst < lit(1e-9) {
        return Ok(NormalOrbitSet::Continuum);
    }
    let node_zero = lit::<T>(1e-13);
    let both = |t: T| {
        wavefront(curve, t, n)
            .map(|w| (w.phi() - T::FRAC_PI_2(), w.d_phi()))
            .unwrap_or((T::nan(), T::nan()))
    };
    let mut roots = Vec::new();
    for i in 0..samples {
        let (a, b) = (g[i], g[(i + 1) % samples]);
        if a.abs() <= node_zero {
            roots.push(thetas[i]);
        } else if b.abs() > node_zero && (a > T::zero()) != (b > T::zero()) {
            let (lo, hi) = (thetas[i], thetas[i] + step);
            if let Ok(r) = safeguarded_newton("normal orbit", both, lo, hi, (lo + hi) * lit(0.5), T::epsilon() * lit(64.0)) {
                roots.push(r);
            }
        }
    }
    let tol = lit::<T>(PERPENDICULAR_TOLERANCE);
    let mut found: Vec<NormalOrbit<T>> = Vec::new();
    let same = |a: T, b: T| {
        let d = wrap_angle(a - b);
        d.min(T::TAU() - d) < lit(1e-7)
    };
    for r in roots {
        let w = wavefront(curve, r, n)?;
        let residual = (w.phi() - T::FRAC_PI_2()).abs();
        if residual > tol {
            continue;
        }
        let t0 = wrap_angle(r);
        let t1 = wrap_angle(w.angle());
        let reducible = (1..n).any(|j| (w.phis[j] - T::FRAC_PI_2()).abs() < tol);
        if found
            .iter()
            .any(|o| (same(o.theta0, t0) && same(o.theta1, t1)) || (same(o.theta0, t1) && same(o.theta1, t0)))
        {
            continue;
        }
        let (a, b) = if t1 < t0 { (t1, t0) } else { (t0, t1) };
        found.push(NormalOrbit {
            theta0: a,
            theta1: b,
            n,
            residual,
            reducible,
        });
    }
    found.sort_by(|a, b| a.theta0.partial_cmp(&b.theta0).unwrap_or(std::cmp::Ordering::Equal));
    Ok(NormalOrbitSet::Orbits(found))
}

/// [`np_detect_with`] on a scan of `max(grid_size, 512)` angles.
pub fn np_detect<T: Real>(curve: &SupportCurve<T>, n: usize) -> Result<NormalOrbitSet<T>> {
    np_detect_with(curve, n, curve.grid_size().max(512))
}

/// Largest deviations `max|l_j − 2|` and `max|x_j − 1|` over `samples` starting angles and
/// bounces `j ≤ m` (chords `l_0..l_{m−1}`, values `x_0..x_m`).
pub fn wavefront_deviation<T: Real>(curve: &SupportCurve<T>, m: usize, samples: usize) -> Result<(T, T)> {
    let two = T::one() + T::one();
    let (mut dl, mut dx) = (T::zero(), T::zero());
    for i in 0..samples {
        let t = T::TAU() * from_usize::<T>(i) / from_usize::<T>(samples);
        let w = wavefront(curve, t, m)?;
        for l in &w.chords {
            dl = dl.max((*l - two).abs());
        }
        for x in &w.x_values {
            dx = dx.max((*x - T::one()).abs());
        }
    }
    Ok((dl, dx))
}

/// Smallest interior margin of `E_1..=E_m` over `samples` starting angles; singular points
/// are skipped and counted.
pub fn envelope_margin<T: Real>(curve: &SupportCurve<T>, m: usize, samples: usize) -> Result<(T, usize)> {
    let mut worst = T::infinity();
    let mut singular = 0;
    for i in 0..samples {
        let t = T::TAU() * from_usize::<T>(i) / from_usize::<T>(samples);
        let w = wavefront(curve, t, m)?;
        for j in 1..=m {
            let e = envelope_from(curve, &w, j);
            if e.singular {
                singular += 1;
            } else {
                worst = worst.min(e.inside_margin);
            }
        }
    }
    Ok((worst, singular))
}
