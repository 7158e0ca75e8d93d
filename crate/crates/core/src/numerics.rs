//! Small one-dimensional solvers and quadrature rules used across the crate.

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let nf = from_usize::<T>(n);
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let quarter = lit::<T>(0.25);
        let half = lit::<T>(0.5);
        for i in 0..n.div_ceil(2) {
            let mut x = (T::PI() * (from_usize::<T>(i + 1) - quarter) / (nf + half)).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                // three-term recurrence for P_n and P_{n-1}
                let (mut p0, mut p1) = (T::one(), x);
                for k in 2..=n {
                    let kf = from_usize::<T>(k);
                    let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { T::one() } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - T::one());
                let dx = pn / dp;
                x = x - dx;
                if dx.abs() <= T::epsilon() * lit(4.0) {
                    break;
                }
            }
            let w = (T::one() + T::one()) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    /// Composite rule: `panels` equal sub-intervals of `[a, b]`.
    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, panels: usize, mut f: F) -> T {
        let h = (b - a) / from_usize::<T>(panels);
        let half = h / (T::one() + T::one());
        let mut total = T::zero();
        for p in 0..panels {
            let mid = a + h * from_usize::<T>(p) + half;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                total = total + *w * f(mid + half * *x);
            }
        }
        total * half
    }
}

/// Brent's method on a bracketing interval `[a, b]` with `f(a)·f(b) ≤ 0`.
pub fn brent_root<T: Real, F: FnMut(T) -> T>(
    what: &'static str,
    mut f: F,
    mut a: T,
    mut b: T,
    tol: T,
) -> Result<T> {
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::Bracket(what));
    }
    let two = T::one() + T::one();
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    let max_iter = 200;
    for _ in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + tol / two;
        let xm = (c - b) / two;
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = lit::<T>(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else if xm > T::zero() {
            b + tol1
        } else {
            b - tol1
        };
        fb = f(b);
    }
    Err(Error::NoConvergence {
        what,
        iterations: max_iter,
    })
}

/// Newton iteration kept inside a sign-change bracket, falling back to bisection.
pub fn safeguarded_newton<T: Real, F: FnMut(T) -> (T, T)>(
    what: &'static str,
    mut f: F,
    lo: T,
    hi: T,
    guess: T,
    tol: T,
) -> Result<T> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) {
        return Err(Error::Bracket(what));
    }
    let (mut xl, mut xh) = if flo < T::zero() { (lo, hi) } else { (hi, lo) };
    let two = T::one() + T::one();
    let mut x = if guess > lo.min(hi) && guess < lo.max(hi) {
        guess
    } else {
        (lo + hi) / two
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..200 {
        let newton_leaves = ((x - xh) * dfx - fx) * ((x - xl) * dfx - fx) > T::zero();
        let too_slow = (two * fx).abs() > (dx_old * dfx).abs();
        if newton_leaves || too_slow {
            dx_old = dx;
            dx = (xh - xl) / two;
            x = xl + dx;
        } else {
            dx_old = dx;
            dx = fx / dfx;
            x = x - dx;
        }
        if dx.abs() < tol {
            return Ok(x);
        }
        let r = f(x);
        fx = r.0;
        dfx = r.1;
        if fx == T::zero() {
            return Ok(x);
        }
        if fx < T::zero() {
            xl = x;
        } else {
            xh = x;
        }
    }
    Err(Error::NoConvergence {
        what,
        iterations: 200,
    })
}

/// Golden-section search for a local minimum on `[a, b]`; returns `(x, f(x))`.
pub fn golden_min<T: Real, F: FnMut(T) -> T>(mut f: F, mut a: T, mut b: T, tol: T) -> (T, T) {
    let inv_phi = lit::<T>(0.618_033_988_749_894_8);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Ordinary least-squares slope and intercept of `y` on `x`.
pub fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = from_usize::<T>(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (x, y) in xs.iter().zip(ys) {
        sxy = sxy + (*x - mx) * (*y - my);
        sxx = sxx + (*x - mx) * (*x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::<f64>::new(8);
        // degree 15 is the exactness limit for 8 nodes
        let v = gl.integrate(-1.0, 2.0, 1, |x| x.powi(15) - 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-9 * exact.abs());
        let w: f64 = gl.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_order_rule_has_center_node() {
        let gl = GaussLegendre::<f64>::new(5);
        assert_eq!(gl.nodes[2], 0.0);
        let v = gl.integrate(0.0, std::f64::consts::PI, 4, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn brent_finds_cubic_root() {
        let r = brent_root("cubic", |x: f64| x * x * x - 2.0, 0.0, 3.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent_root("none", |x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn safeguarded_newton_converges_from_bad_guess() {
        let r = safeguarded_newton("cos", |x: f64| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 0.99, 1e-15)
            .unwrap();
        assert!((r.cos() - r).abs() < 1e-14);
    }

    #[test]
    fn golden_min_locates_parabola_vertex() {
        let (x, fx) = golden_min(|x: f64| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn linear_fit_recovers_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().map(|x| -2.0 * x + 0.25).collect();
        let (m, c) = linear_fit(&xs, &ys);
        assert!((m + 2.0).abs() < 1e-13 && (c - 0.25).abs() < 1e-13);
    }
}
