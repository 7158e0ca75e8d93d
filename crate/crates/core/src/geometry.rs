//! Strictly convex ovals stored through their support function in tangent-angle
//! parametrization.
//!
//! Conventions: `T(θ) = (cos θ, sin θ)` is the unit tangent, `N(θ) = (−sin θ, cos θ)` the
//! inward normal, `X(θ) = h′(θ)T(θ) − h(θ)N(θ)` the boundary point and
//! `R(θ) = h(θ) + h″(θ)` the radius of curvature. The outward normal at `X(θ)` points in
//! direction `θ − π/2`.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::GaussLegendre;
use crate::scalar::{from_usize, lit, wrap_angle, lift_after, Real};
use crate::spectral::{Harmonics, SpectralGrid};

/// Harmonic budget used by the `make_*` shorthands.
pub const DEFAULT_HARMONICS: usize = 64;

/// Point or vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanePoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PlanePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    /// Unit vector at angle `alpha` from the x-axis.
    pub fn unit(alpha: T) -> Self {
        let (s, c) = alpha.sin_cos();
        Self::new(c, s)
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Self {
        self * (T::one() / self.norm())
    }

    /// Counter-clockwise rotation by a right angle.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }
}

impl<T: Real> Add for PlanePoint<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Real> Sub for PlanePoint<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Real> Mul<T> for PlanePoint<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Real> Neg for PlanePoint<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Support function and curvature radius at one tangent angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalGeometry<T> {
    pub h: T,
    pub dh: T,
    pub d2h: T,
    /// `R = h + h″`.
    pub radius: T,
    /// `R′ = h′ + h‴`.
    pub dradius: T,
}

impl<T: Real> LocalGeometry<T> {
    pub fn curvature(&self) -> T {
        T::one() / self.radius
    }

    /// `k′ = −R′/R²`.
    pub fn dcurvature(&self) -> T {
        -self.dradius / (self.radius * self.radius)
    }
}

/// Support-function values sampled on the curve's evaluation grid.
#[derive(Debug, Clone)]
pub struct GridSample<T> {
    pub theta: Vec<T>,
    pub h: Vec<T>,
    pub dh: Vec<T>,
    pub radius: Vec<T>,
    pub dradius: Vec<T>,
}

/// One row of a sampled trace export.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub theta: T,
    pub point: PlanePoint<T>,
    pub h: T,
    pub radius: T,
}

/// A strictly convex oval containing the origin, stored as a truncated Fourier series of
/// its support function.
#[derive(Clone)]
pub struct SupportCurve<T: Real> {
    harmonics: Harmonics<T>,
    grid: Arc<SpectralGrid<T>>,
}

impl<T: Real> std::fmt::Debug for SupportCurve<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SupportCurve")
            .field("harmonic_count", &self.harmonic_count())
            .field("grid_size", &self.grid_size())
            .field("harmonics", &self.harmonics)
            .finish()
    }
}

impl<T: Real> PartialEq for SupportCurve<T> {
    fn eq(&self, other: &Self) -> bool {
        self.grid_size() == other.grid_size() && self.harmonics == other.harmonics
    }
}

/// Smallest power of two at least `4·harmonic_count` (and at least 16).
pub fn default_grid_size(harmonic_count: usize) -> usize {
    (4 * harmonic_count).max(16).next_power_of_two()
}

impl<T: Real> SupportCurve<T> {
    /// Validates and wraps a harmonic series.
    ///
    /// `grid_size` must be a power of two no smaller than `4·harmonic_count`. Fails if the
    /// support function or the curvature radius is non-positive at any grid node.
    pub fn new(harmonics: Harmonics<T>, grid_size: usize) -> Result<Self> {
        let n = harmonics.harmonic_count();
        if n == 0 {
            return Err(Error::invalid("harmonic_count", "must be positive"));
        }
        if !grid_size.is_power_of_two() || grid_size < 4 * n {
            return Err(Error::invalid(
                "grid_size",
                format!("{grid_size} is not a power of two ≥ 4·{n}"),
            ));
        }
        if harmonics
            .cos
            .iter()
            .chain(&harmonics.sin)
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("harmonics", "non-finite coefficient"));
        }
        let curve = Self {
            harmonics,
            grid: Arc::new(SpectralGrid::new(grid_size)),
        };
        curve.validate()?;
        Ok(curve)
    }

    /// Same as [`SupportCurve::new`] with the default grid for the harmonic count.
    pub fn from_harmonics(harmonics: Harmonics<T>) -> Result<Self> {
        let g = default_grid_size(harmonics.harmonic_count());
        Self::new(harmonics, g)
    }

    /// Checks positivity of `h` and `R` on the grid.
    pub fn validate(&self) -> Result<()> {
        let h = self.grid.synthesize(&self.harmonics);
        let r = self.grid.synthesize(&self.harmonics.plus_second_derivative());
        for (j, (hv, rv)) in h.iter().zip(&r).enumerate() {
            let theta = self.grid.node(j).to_f64().unwrap_or(f64::NAN);
            if !(*rv > T::zero()) {
                return Err(Error::ConvexityLoss {
                    theta,
                    radius: rv.to_f64().unwrap_or(f64::NAN),
                });
            }
            if !(*hv > T::zero()) {
                return Err(Error::OriginOutside {
                    theta,
                    support: hv.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(())
    }

    /// Circle of the given radius centred at the origin.
    pub fn circle(radius: T, harmonic_count: usize) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::invalid("radius", "must be positive"));
        }
        Self::from_harmonics(Harmonics::constant(radius, harmonic_count.max(1)))
    }

    /// Ellipse with semi-axes `a ≥ b > 0`, major axis along x, centred at the origin.
    ///
    /// The exact support function in outward-normal angle ψ is `√(a² cos²ψ + b² sin²ψ)`.
    /// With ψ = θ − π/2 this becomes `√(a² sin²θ + b² cos²θ)`, which is sampled on a
    /// fine grid and truncated to `harmonic_count` harmonics.
    pub fn ellipse(a: T, b: T, harmonic_count: usize) -> Result<Self> {
        if !(b > T::zero()) {
            return Err(Error::invalid("b", "semi-axis must be positive"));
        }
        if a < b {
            return Err(Error::invalid("a", "major semi-axis must satisfy a ≥ b"));
        }
        let n = harmonic_count.max(1);
        let fine = SpectralGrid::<T>::new((8 * n).max(1024).next_power_of_two());
        let values: Vec<T> = fine
            .nodes()
            .into_iter()
            .map(|t| {
                let (s, c) = t.sin_cos();
                (a * a * s * s + b * b * c * c).sqrt()
            })
            .collect();
        let mut h = fine.analyze(&values, n);
        // the exact series has only even cosine harmonics
        for k in 0..=n {
            h.sin[k] = T::zero();
            if k % 2 == 1 {
                h.cos[k] = T::zero();
            }
        }
        Self::from_harmonics(h)
    }

    /// Curve of constant width `d`: `h = d/2 + Σ (c cos jθ + s sin jθ)` over odd `j ≥ 3`.
    pub fn constant_width(d: T, odd_harmonics: &[(usize, T, T)], harmonic_count: usize) -> Result<Self> {
        if !(d > T::zero()) {
            return Err(Error::invalid("d", "width must be positive"));
        }
        let top = odd_harmonics.iter().map(|h| h.0).max().unwrap_or(1);
        let n = harmonic_count.max(top).max(1);
        let mut h = Harmonics::constant(d / (T::one() + T::one()), n);
        for &(freq, c, s) in odd_harmonics {
            if freq % 2 == 0 {
                return Err(Error::EvenHarmonic(freq));
            }
            if freq < 3 {
                return Err(Error::invalid("odd_harmonics", format!("frequency {freq} < 3")));
            }
            h.cos[freq] = h.cos[freq] + c;
            h.sin[freq] = h.sin[freq] + s;
        }
        Self::from_harmonics(h)
    }

    pub fn harmonics(&self) -> &Harmonics<T> {
        &self.harmonics
    }

    pub fn harmonic_count(&self) -> usize {
        self.harmonics.harmonic_count()
    }

    pub fn grid_size(&self) -> usize {
        self.grid.size()
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        &self.grid
    }

    /// Re-expresses the curve with a different harmonic budget (truncating or padding).
    pub fn with_harmonic_count(&self, harmonic_count: usize) -> Result<Self> {
        Self::from_harmonics(self.harmonics.resized(harmonic_count))
    }

    /// Replaces the coefficients while keeping the grid; validates the result.
    pub fn with_harmonics(&self, harmonics: Harmonics<T>) -> Result<Self> {
        let curve = Self {
            harmonics,
            grid: Arc::clone(&self.grid),
        };
        curve.validate()?;
        Ok(curve)
    }

    /// `(h, h′, h″, R)` plus `R′` at `theta`.
    pub fn eval(&self, theta: T) -> LocalGeometry<T> {
        let [h, dh, d2h, d3h] = self.harmonics.eval_derivatives(theta);
        LocalGeometry {
            h,
            dh,
            d2h,
            radius: h + d2h,
            dradius: dh + d3h,
        }
    }

    pub fn support(&self, theta: T) -> T {
        self.harmonics.eval(theta)
    }

    pub fn radius(&self, theta: T) -> T {
        self.eval(theta).radius
    }

    pub fn tangent(&self, theta: T) -> PlanePoint<T> {
        PlanePoint::unit(theta)
    }

    /// Inward unit normal.
    pub fn normal(&self, theta: T) -> PlanePoint<T> {
        PlanePoint::unit(theta).perp()
    }

    pub fn position(&self, theta: T) -> PlanePoint<T> {
        let g = self.eval(theta);
        self.position_from(theta, &g)
    }

    pub(crate) fn position_from(&self, theta: T, g: &LocalGeometry<T>) -> PlanePoint<T> {
        let t = PlanePoint::unit(theta);
        t * g.dh - t.perp() * g.h
    }

    /// Centre of curvature `X + R·N = h′T + (R − h)N`.
    pub fn evolute(&self, theta: T) -> PlanePoint<T> {
        let g = self.eval(theta);
        let t = PlanePoint::unit(theta);
        t * g.dh + t.perp() * (g.radius - g.h)
    }

    /// `h(θ) + h(θ + π)`.
    pub fn width(&self, theta: T) -> T {
        self.support(theta) + self.support(theta + T::PI())
    }

    /// Samples of h, h′, R and R′ on the curve's grid.
    pub fn grid_sample(&self) -> GridSample<T> {
        let d = self.harmonics.derivative();
        let r = self.harmonics.plus_second_derivative();
        GridSample {
            theta: self.grid.nodes(),
            h: self.grid.synthesize(&self.harmonics),
            dh: self.grid.synthesize(&d),
            dradius: self.grid.synthesize(&r.derivative()),
            radius: self.grid.synthesize(&r),
        }
    }

    /// Mean over grid nodes (trapezoid rule on the periodic grid, divided by 2π).
    fn grid_mean<F: Fn(T, T) -> T>(&self, f: F) -> T {
        let h = self.grid.synthesize(&self.harmonics);
        let r = self.grid.synthesize(&self.harmonics.plus_second_derivative());
        let total: T = h.iter().zip(&r).map(|(a, b)| f(*a, *b)).sum();
        total / from_usize::<T>(self.grid_size())
    }

    /// Enclosed area `½ ∫ h R dθ`.
    pub fn area(&self) -> T {
        self.grid_mean(|h, r| h * r) * T::PI()
    }

    /// Perimeter `∫ R dθ = 2π a₀`.
    pub fn perimeter(&self) -> T {
        T::TAU() * self.harmonics.cos[0]
    }

    /// Entropy `(1/2π) ∫ log k dθ = −(1/2π) ∫ log R dθ`.
    pub fn entropy(&self) -> T {
        -self.grid_mean(|_, r| r.ln())
    }

    /// `w = ∫ log h dθ`, monotone along the normalized flow.
    pub fn log_support_integral(&self) -> T {
        self.grid_mean(|h, _| h.ln()) * T::TAU()
    }

    pub fn min_radius(&self) -> T {
        self.grid
            .synthesize(&self.harmonics.plus_second_derivative())
            .into_iter()
            .fold(T::infinity(), T::min)
    }

    /// `∫_{θ₀}^{θ₁} cos(θ − θ₀ − φ) R(θ) dθ`, which equals the chord length when `θ₁` is
    /// the far intersection of the ray from `X(θ₀)` in direction `cos φ T + sin φ N`.
    ///
    /// `θ₁` is lifted into `(θ₀, θ₀ + 2π]`. A mismatch against the Euclidean chord beyond
    /// `1e-8 · perimeter` is reported as an inconsistent triple.
    pub fn chord_length_integral(&self, theta0: T, theta1: T, phi: T) -> Result<T> {
        let upper = lift_after(theta1, theta0);
        let integral = self.chord_projection_integral(theta0, upper, phi);
        let distance = self.position(theta1).distance(self.position(theta0));
        if (integral - distance).abs() > lit::<T>(1e-8) * self.perimeter() {
            return Err(Error::InconsistentChord {
                integral: integral.to_f64().unwrap_or(f64::NAN),
                distance: distance.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(integral)
    }

    /// The projection integral without the consistency check; `upper` is used as given.
    pub fn chord_projection_integral(&self, theta0: T, upper: T, phi: T) -> T {
        let gl = GaussLegendre::<T>::new(12);
        let panels = (self.harmonic_count() / 2).max(16);
        let r = self.harmonics.plus_second_derivative();
        gl.integrate(theta0, upper, panels, |t| (t - theta0 - phi).cos() * r.eval(t))
    }

    /// Entropy lower bound on chord lengths, `exp(C₀/2 − ℰ/π)`.
    ///
    /// The constant `C₀ = 2·(2/π)∫₀^π log|cos u| du` does not depend on the curve; the
    /// value is a diagnostic and only meaningful for chords leaving at angles bounded away
    /// from grazing.
    pub fn chord_lower_bound(&self) -> T {
        (chord_bound_constant::<T>() / (T::one() + T::one()) - self.entropy() / T::PI()).exp()
    }

    /// Arclength from θ = 0, integrated termwise from the series of R.
    pub fn arclength(&self, theta: T) -> T {
        let h = &self.harmonics;
        let mut s = h.cos[0] * theta;
        for n in 2..=h.harmonic_count() {
            let k = from_usize::<T>(n);
            let f = (T::one() - k * k) / k;
            let (sn, cn) = (k * theta).sin_cos();
            s = s + f * (h.cos[n] * sn + h.sin[n] * (T::one() - cn));
        }
        s
    }

    /// Inverse of [`SupportCurve::arclength`], returned in `[0, 2π)` plus whole turns.
    pub fn theta_at_arclength(&self, s: T) -> T {
        let perimeter = self.perimeter();
        let turns = (s / perimeter).floor();
        let rem = s - turns * perimeter;
        let guess = rem / self.harmonics.cos[0];
        let theta = crate::numerics::safeguarded_newton(
            "arclength inverse",
            |t| (self.arclength(t) - rem, self.radius(t)),
            T::zero(),
            T::TAU(),
            guess,
            T::epsilon() * lit(16.0),
        )
        .unwrap_or(guess);
        theta + turns * T::TAU()
    }

    /// `count` equispaced samples `(θ, X, h, R)` of the trace.
    pub fn sample_trace(&self, count: usize) -> Vec<TraceRow<T>> {
        (0..count)
            .map(|j| {
                let theta = T::TAU() * from_usize::<T>(j) / from_usize::<T>(count);
                let g = self.eval(theta);
                TraceRow {
                    theta,
                    point: self.position_from(theta, &g),
                    h: g.h,
                    radius: g.radius,
                }
            })
            .collect()
    }

    /// Signed distance from `p` to the boundary, positive inside.
    ///
    /// Computed as `min_ψ [h(ψ) + ⟨p, N(ψ)⟩]`, exact for convex regions: the grid minimum
    /// is refined by golden-section search.
    pub fn interior_margin(&self, p: PlanePoint<T>) -> T {
        let h = self.grid.synthesize(&self.harmonics);
        let nodes = self.grid.nodes();
        let margin = |psi: T| self.support(psi) + p.dot(self.normal(psi));
        let (mut best, mut best_j) = (T::infinity(), 0);
        for (j, (t, hv)) in nodes.iter().zip(&h).enumerate() {
            let v = *hv + p.dot(self.normal(*t));
            if v < best {
                best = v;
                best_j = j;
            }
        }
        let step = T::TAU() / from_usize::<T>(self.grid_size());
        let centre = nodes[best_j];
        let (_, refined) = crate::numerics::golden_min(
            margin,
            centre - step,
            centre + step,
            T::epsilon().sqrt() * lit(1e-2),
        );
        refined.min(best)
    }
}

/// `C₀ = 2·(2/π)∫₀^π log|cos u| du`, evaluated by quadrature.
///
/// The logarithmic endpoint singularity is split off: `∫₀^π log|cos u| du =
/// 2∫₀^{π/2} log sin v dv` with `log sin v = log v + log(sin v / v)`.
pub fn chord_bound_constant<T: Real>() -> T {
    let half_pi = T::FRAC_PI_2();
    let log_part = half_pi * (half_pi.ln() - T::one());
    let gl = GaussLegendre::<T>::new(16);
    let smooth = gl.integrate(T::zero(), half_pi, 8, |v| {
        if v == T::zero() {
            T::zero()
        } else {
            (v.sin() / v).ln()
        }
    });
    let integral = (T::one() + T::one()) * (log_part + smooth);
    lit::<T>(4.0) / T::PI() * integral
}

/// Normalizes an angle argument the way every public operation does.
pub fn normalize_angle<T: Real>(theta: T) -> T {
    wrap_angle(theta)
}

/// Shorthand for a default-resolution circle.
pub fn make_circle<T: Real>(radius: T) -> Result<SupportCurve<T>> {
    SupportCurve::circle(radius, DEFAULT_HARMONICS)
}

/// Shorthand for a default-resolution ellipse.
pub fn make_ellipse<T: Real>(a: T, b: T) -> Result<SupportCurve<T>> {
    SupportCurve::ellipse(a, b, DEFAULT_HARMONICS)
}

/// Shorthand for a default-resolution constant-width curve.
pub fn make_constant_width<T: Real>(d: T, odd_harmonics: &[(usize, T, T)]) -> Result<SupportCurve<T>> {
    SupportCurve::constant_width(d, odd_harmonics, DEFAULT_HARMONICS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

    fn trefoil() -> SupportCurve<f64> {
        make_constant_width::<f64>(2.0, &[(3, 0.05, 0.0)]).unwrap()
    }

    #[test]
    fn circle_has_constant_support_and_radius() {
        let c = make_circle::<f64>(1.0).unwrap();
        for k in 0..9 {
            let g = c.eval(k as f64 * 0.7);
            assert_eq!((g.h, g.dh, g.d2h, g.radius), (1.0, 0.0, 0.0, 1.0));
        }
        assert!((c.area() - PI).abs() < 1e-14);
        assert_eq!(c.entropy(), 0.0);
        let c2 = make_circle::<f64>(2.0).unwrap();
        assert!((c2.width(0.4) - 4.0).abs() < 1e-15);
        assert!(make_circle::<f64>(0.0).is_err());
        assert!(make_circle::<f64>(-1.0).is_err());
    }

    #[test]
    fn round_ellipse_is_the_circle() {
        let e = make_ellipse::<f64>(1.0, 1.0).unwrap();
        let c = make_circle::<f64>(1.0).unwrap();
        assert!(e.harmonics().max_abs_coefficient_diff(c.harmonics()) < 1e-15);
    }

    #[test]
    fn ellipse_curvature_radii_at_axis_endpoints() {
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        // major-axis endpoints sit at θ = π/2, 3π/2; minor at 0, π
        assert!((e.radius(FRAC_PI_2) - 0.512).abs() < 1e-12);
        assert!((e.radius(3.0 * FRAC_PI_2) - 0.512).abs() < 1e-12);
        assert!((e.radius(0.0) - 1.953125).abs() < 1e-12);
        assert!((e.radius(PI) - 1.953125).abs() < 1e-12);
        assert!((e.area() - PI).abs() < 1e-12);
    }

    #[test]
    fn ellipse_rejects_swapped_axes() {
        assert!(make_ellipse::<f64>(0.8, 1.25).is_err());
        assert!(make_ellipse::<f64>(1.0, 0.0).is_err());
    }

    #[test]
    fn truncation_that_breaks_convexity_is_an_error() {
        // a very flat ellipse cannot be captured by 4 harmonics
        let err = SupportCurve::<f64>::ellipse(5.0, 0.2, 4).unwrap_err();
        assert!(matches!(err, Error::ConvexityLoss { .. }));
    }

    #[test]
    fn ellipse_trace_satisfies_implicit_equation() {
        let (a, b) = (1.25, 0.8);
        let e = make_ellipse::<f64>(a, b).unwrap();
        for t in e.grid().nodes() {
            let p = e.position(t);
            let res = (p.x * p.x / (a * a) + p.y * p.y / (b * b) - 1.0).abs();
            assert!(res < 1e-6, "residual {res} at {t}");
        }
        let p = e.position(FRAC_PI_2);
        assert!((p.x - a).abs() < 1e-12 && p.y.abs() < 1e-12);
    }

    #[test]
    fn constant_width_construction() {
        let c = trefoil();
        let g = c.eval(0.0);
        assert!((g.h - 1.05).abs() < 1e-15);
        assert!(g.dh.abs() < 1e-15);
        assert!((g.d2h + 0.45).abs() < 1e-14);
        assert!((g.radius - 0.6).abs() < 1e-14);
        for k in 0..50 {
            let t = k as f64 * 0.13;
            let r = c.radius(t);
            assert!((r - (1.0 - 0.4 * (3.0 * t).cos())).abs() < 1e-14);
            assert!((c.width(t) - 2.0).abs() < 1e-14);
        }
        assert!((c.area() - PI * (1.0 - 4.0 * 0.05f64.powi(2))).abs() < 1e-13);
        assert!((c.area() - 3.110_176_7).abs() < 1e-7);
        let unit = make_constant_width::<f64>(2.0, &[]).unwrap();
        assert!(unit.harmonics().max_abs_coefficient_diff(make_circle::<f64>(1.0).unwrap().harmonics()) == 0.0);
    }

    #[test]
    fn constant_width_rejects_even_and_nonconvex() {
        assert!(matches!(
            make_constant_width::<f64>(2.0, &[(4, 0.01, 0.0)]),
            Err(Error::EvenHarmonic(4))
        ));
        assert!(make_constant_width::<f64>(2.0, &[(1, 0.01, 0.0)]).is_err());
        // |ε| must stay below 1/8 for a single cos 3θ term
        assert!(make_constant_width::<f64>(2.0, &[(3, 0.13, 0.0)]).is_err());
        assert!(make_constant_width::<f64>(2.0, &[(3, 0.12, 0.0)]).is_ok());
    }

    #[test]
    fn frame_and_position_relations() {
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        for k in 0..40 {
            let t = k as f64 * TAU / 40.0 + 0.01;
            let p = e.position(t);
            let n = e.normal(t);
            assert!((p.dot(n) + e.support(t)).abs() < 1e-14);
            assert!((e.tangent(t).norm() - 1.0).abs() < 1e-15);
            assert!((n.norm() - 1.0).abs() < 1e-15);
            // dX/dθ = R T
            let d = 1e-6;
            let fd = (e.position(t + d) - e.position(t - d)) * (0.5 / d);
            let expect = e.tangent(t) * e.radius(t);
            assert!((fd - expect).norm() < 1e-8);
            // closure
            assert!((e.position(t + TAU) - p).norm() < 1e-13);
        }
        let c = make_circle::<f64>(1.0).unwrap();
        assert!((c.position(0.3).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evolute_examples() {
        let c = make_circle::<f64>(1.0).unwrap();
        assert!(c.evolute(1.1).norm() < 1e-15);
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        let cusp = e.evolute(FRAC_PI_2);
        assert!((cusp.x - (1.25 - 0.64 / 1.25)).abs() < 1e-12);
        assert!((cusp.x - 0.738).abs() < 1e-12 && cusp.y.abs() < 1e-12);
        let other = e.evolute(3.0 * FRAC_PI_2);
        assert!((other.x + 0.738).abs() < 1e-12);
    }

    #[test]
    fn width_area_entropy_examples() {
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        assert!((e.width(FRAC_PI_2) - 2.5).abs() < 1e-12);
        assert!((e.width(0.0) - 1.6).abs() < 1e-12);
        let c = make_circle::<f64>(1.0).unwrap();
        assert!((c.width(2.0) - 2.0).abs() < 1e-15);
        assert!(e.entropy().is_finite());
        // perimeter against Ramanujan's second approximation
        let (a, b) = (1.25f64, 0.8f64);
        let hh = ((a - b) / (a + b)).powi(2);
        let ram = PI * (a + b) * (1.0 + 3.0 * hh / (10.0 + (4.0 - 3.0 * hh).sqrt()));
        assert!((e.perimeter() - ram).abs() < 1e-6);
    }

    #[test]
    fn chord_integral_examples() {
        let c = make_circle::<f64>(1.0).unwrap();
        let v = c.chord_length_integral(0.4, 0.4 + PI, FRAC_PI_2).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = c.chord_length_integral(0.4, 0.4 + FRAC_PI_2, FRAC_PI_4).unwrap();
        assert!((v - SQRT_2).abs() < 1e-13);
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        let v = e.chord_length_integral(FRAC_PI_2, 3.0 * FRAC_PI_2, FRAC_PI_2).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
        // wrong far point is flagged
        assert!(matches!(
            c.chord_length_integral(0.4, 0.4 + 2.0, FRAC_PI_2),
            Err(Error::InconsistentChord { .. })
        ));
    }

    #[test]
    fn chord_bound_constant_matches_closed_form() {
        let c0: f64 = chord_bound_constant();
        assert!((c0 + 4.0 * 2f64.ln()).abs() < 1e-13);
        let circle = make_circle::<f64>(1.0).unwrap();
        let bound = circle.chord_lower_bound();
        assert!(bound > 0.0 && bound <= 2.0);
        assert!((bound - 0.25).abs() < 1e-13);
    }

    #[test]
    fn arclength_round_trip() {
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        assert!((e.arclength(TAU) - e.perimeter()).abs() < 1e-12);
        for k in 0..13 {
            let t = k as f64 * 0.45;
            let s = e.arclength(t);
            assert!((e.theta_at_arclength(s) - t).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_margin_of_points() {
        let c = make_circle::<f64>(1.0).unwrap();
        assert!((c.interior_margin(PlanePoint::origin()) - 1.0).abs() < 1e-14);
        assert!((c.interior_margin(PlanePoint::new(0.5, 0.0)) - 0.5).abs() < 1e-12);
        assert!(c.interior_margin(PlanePoint::new(1.5, 0.0)) < 0.0);
        let e = make_ellipse::<f64>(1.25, 0.8).unwrap();
        assert!((e.interior_margin(PlanePoint::origin()) - 0.8).abs() < 1e-10);
    }

    #[test]
    fn f32_smoke() {
        let e = SupportCurve::<f32>::ellipse(1.25, 0.8, 32).unwrap();
        assert!((e.radius(std::f32::consts::FRAC_PI_2) - 0.512).abs() < 1e-4);
        assert!((e.area() - std::f32::consts::PI).abs() < 1e-4);
    }
}
