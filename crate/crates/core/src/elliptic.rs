//! Elliptic integrals of the first kind and Jacobi elliptic functions, in the modulus
//! convention (`k`, not `m = k²`).

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

fn check_modulus<T: Real>(k: T) -> Result<()> {
    if !(k >= T::zero() && k < T::one()) {
        return Err(Error::invalid("k", format!("modulus {k} outside [0, 1)")));
    }
    Ok(())
}

/// Arithmetic-geometric mean.
pub fn agm<T: Real>(mut a: T, mut b: T) -> T {
    let two = T::one() + T::one();
    for _ in 0..64 {
        if (a - b).abs() <= T::epsilon() * a {
            break;
        }
        let m = (a + b) / two;
        b = (a * b).sqrt();
        a = m;
    }
    (a + b) / two
}

/// `K(k) = ∫₀^{π/2} du / √(1 − k² sin²u) = π / (2·agm(1, √(1 − k²)))`.
pub fn elliptic_k<T: Real>(k: T) -> Result<T> {
    check_modulus(k)?;
    Ok(T::FRAC_PI_2() / agm(T::one(), (T::one() - k * k).sqrt()))
}

/// Carlson's symmetric integral `R_F(x, y, z)` by duplication.
pub fn carlson_rf<T: Real>(mut x: T, mut y: T, mut z: T) -> T {
    let three = lit::<T>(3.0);
    let quarter = lit::<T>(0.25);
    for _ in 0..100 {
        let mu = (x + y + z) / three;
        let dx = (mu - x) / mu;
        let dy = (mu - y) / mu;
        let dz = (mu - z) / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < T::epsilon().powf(lit(1.0 / 6.0)) * lit(0.1) {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (T::one() - e2 / lit(10.0) + e3 / lit(14.0) + e2 * e2 / lit(24.0) - lit::<T>(3.0) * e2 * e3 / lit(44.0)) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lam = sx * (sy + sz) + sy * sz;
        x = (x + lam) * quarter;
        y = (y + lam) * quarter;
        z = (z + lam) * quarter;
    }
    let mu = (x + y + z) / three;
    T::one() / mu.sqrt()
}

/// `F(φ, k) = ∫₀^φ du / √(1 − k² sin²u)` for any real φ, using
/// `F(φ + mπ) = F(φ) + 2mK`.
pub fn elliptic_f<T: Real>(phi: T, k: T) -> Result<T> {
    check_modulus(k)?;
    let m = (phi / T::PI()).round();
    let r = phi - m * T::PI();
    let (s, c) = r.sin_cos();
    let base = s * carlson_rf(c * c, T::one() - k * k * s * s, T::one());
    let shift = if m == T::zero() {
        T::zero()
    } else {
        (m + m) * elliptic_k(k)?
    };
    Ok(base + shift)
}

/// Jacobi elliptic functions with their amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobi<T> {
    pub sn: T,
    pub cn: T,
    pub dn: T,
    /// `am(u)`, with `sn = sin am` and `cn = cos am`.
    pub am: T,
}

/// `(sn, cn, dn)` of `u` at modulus `k` by the descending Landen (AGM) scheme.
pub fn jacobi<T: Real>(u: T, k: T) -> Result<Jacobi<T>> {
    check_modulus(k)?;
    if k == T::zero() {
        let (s, c) = u.sin_cos();
        return Ok(Jacobi { sn: s, cn: c, dn: T::one(), am: u });
    }
    let two = T::one() + T::one();
    let mut a = vec![T::one()];
    let mut c = vec![k];
    let mut b = (T::one() - k * k).sqrt();
    while c.last().unwrap().abs() > T::epsilon() && a.len() < 64 {
        let an = *a.last().unwrap();
        let next_a = (an + b) / two;
        let next_c = (an - b) / two;
        b = (an * b).sqrt();
        a.push(next_a);
        c.push(next_c);
    }
    let n = a.len() - 1;
    let mut phi = two.powi(n as i32) * a[n] * u;
    for i in (1..=n).rev() {
        phi = (phi + (c[i] / a[i] * phi.sin()).asin()) / two;
    }
    let (sn, cn) = phi.sin_cos();
    let dn = (T::one() - k * k * sn * sn).sqrt();
    Ok(Jacobi { sn, cn, dn, am: phi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::GaussLegendre;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k_series(k: f64) -> f64 {
        // π/2 Σ [(2n)! / (2^{2n} n!²)]² k^{2n}
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..400 {
            let r = (2 * n - 1) as f64 / (2 * n) as f64;
            term *= r * r * k * k;
            sum += term;
            if term < 1e-18 {
                break;
            }
        }
        FRAC_PI_2 * sum
    }

    fn f_quadrature(phi: f64, k: f64) -> f64 {
        GaussLegendre::<f64>::new(20).integrate(0.0, phi, 16, |u| 1.0 / (1.0 - k * k * u.sin().powi(2)).sqrt())
    }

    #[test]
    fn complete_integral() {
        assert_eq!(elliptic_k(0.0f64).unwrap(), FRAC_PI_2);
        for k in [0.1, 0.5, 0.8, 0.95] {
            let v = elliptic_k(k).unwrap();
            assert!((v - k_series(k)).abs() < 1e-12 * v, "{k}");
        }
        assert!((elliptic_k(0.5f64).unwrap() - 1.685_750_354_812_596).abs() < 1e-14);
        assert!(elliptic_k(1.0f64).is_err());
        assert!(elliptic_k(-0.1f64).is_err());
    }

    #[test]
    fn incomplete_integral() {
        for phi in [0.0, 0.3, 1.0, FRAC_PI_2, 2.0, 4.0, -1.2] {
            assert!((elliptic_f(phi, 0.0f64).unwrap() - phi).abs() < 1e-15);
        }
        for k in [0.3, 0.7, 0.9] {
            for phi in [0.2, 0.9, 1.5, FRAC_PI_2, 2.5, 5.0] {
                let v = elliptic_f(phi, k).unwrap();
                assert!((v - f_quadrature(phi, k)).abs() < 1e-12 * (1.0 + v), "{phi} {k}");
            }
            assert!((elliptic_f(FRAC_PI_2, k).unwrap() - elliptic_k(k).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_identities() {
        let j = jacobi(0.0f64, 0.6).unwrap();
        assert_eq!((j.sn, j.cn, j.dn), (0.0, 1.0, 1.0));
        let j = jacobi(0.7f64, 0.0).unwrap();
        assert_eq!((j.sn, j.cn, j.dn), (0.7f64.sin(), 0.7f64.cos(), 1.0));
        let k = 0.5f64;
        let kk = elliptic_k(k).unwrap();
        assert!((jacobi(kk, k).unwrap().sn - 1.0).abs() < 1e-14);
        for k in [0.2f64, 0.5, 0.9, 0.99] {
            for i in 0..200 {
                let u = -6.0 + 0.06 * i as f64;
                let j = jacobi(u, k).unwrap();
                assert!((j.sn * j.sn + j.cn * j.cn - 1.0).abs() < 1e-12);
                assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() < 1e-12);
            }
            for i in 0..50 {
                let phi = -PI + 0.13 * i as f64;
                let u = elliptic_f(phi, k).unwrap();
                assert!((jacobi(u, k).unwrap().sn - phi.sin()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sn_is_4k_periodic() {
        let k = 0.8f64;
        let kk = elliptic_k(k).unwrap();
        for u in [0.1f64, 0.9, 2.0] {
            let (a, b) = (jacobi(u, k).unwrap(), jacobi(u + 4.0 * kk, k).unwrap());
            assert!((a.sn - b.sn).abs() < 1e-12 && (a.cn - b.cn).abs() < 1e-12);
            // derivative of sn is cn·dn
            let h = 1e-6;
            let d = (jacobi(u + h, k).unwrap().sn - jacobi(u - h, k).unwrap().sn) / (2.0 * h);
            assert!((d - a.cn * a.dn).abs() < 1e-9);
        }
    }
}
