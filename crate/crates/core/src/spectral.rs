//! Truncated Fourier series on the circle and their FFT-backed grid transforms.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::scalar::{from_usize, Real};

/// Real trigonometric polynomial `a₀ + Σₙ (aₙ cos nθ + bₙ sin nθ)`, `n = 1..=N`.
///
/// `cos[0]` holds the mean and `sin[0]` is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Harmonics<T> {
    pub cos: Vec<T>,
    pub sin: Vec<T>,
}

impl<T: Real> Harmonics<T> {
    pub fn zeros(harmonic_count: usize) -> Self {
        Self {
            cos: vec![T::zero(); harmonic_count + 1],
            sin: vec![T::zero(); harmonic_count + 1],
        }
    }

    pub fn constant(value: T, harmonic_count: usize) -> Self {
        let mut h = Self::zeros(harmonic_count);
        h.cos[0] = value;
        h
    }

    pub fn harmonic_count(&self) -> usize {
        self.cos.len() - 1
    }

    /// Truncates or zero-pads to `harmonic_count`.
    pub fn resized(&self, harmonic_count: usize) -> Self {
        let mut out = Self::zeros(harmonic_count);
        let n = harmonic_count.min(self.harmonic_count());
        out.cos[..=n].copy_from_slice(&self.cos[..=n]);
        out.sin[..=n].copy_from_slice(&self.sin[..=n]);
        out
    }

    /// Evaluates the series and its first three θ-derivatives at one angle.
    pub fn eval_derivatives(&self, theta: T) -> [T; 4] {
        let (s1, c1) = theta.sin_cos();
        let (mut sn, mut cn) = (T::zero(), T::one());
        let mut out = [self.cos[0], T::zero(), T::zero(), T::zero()];
        for n in 1..=self.harmonic_count() {
            // angle addition: (cos, sin)(nθ) from (n−1)θ
            let c = cn * c1 - sn * s1;
            let s = sn * c1 + cn * s1;
            cn = c;
            sn = s;
            let (a, b) = (self.cos[n], self.sin[n]);
            if a == T::zero() && b == T::zero() {
                continue;
            }
            let k = from_usize::<T>(n);
            let even = a * cn + b * sn;
            let odd = b * cn - a * sn;
            out[0] = out[0] + even;
            out[1] = out[1] + k * odd;
            out[2] = out[2] - k * k * even;
            out[3] = out[3] - k * k * k * odd;
        }
        out
    }

    pub fn eval(&self, theta: T) -> T {
        self.eval_derivatives(theta)[0]
    }

    /// Termwise θ-derivative.
    pub fn derivative(&self) -> Self {
        let mut out = Self::zeros(self.harmonic_count());
        for n in 1..=self.harmonic_count() {
            let k = from_usize::<T>(n);
            out.cos[n] = k * self.sin[n];
            out.sin[n] = -k * self.cos[n];
        }
        out
    }

    /// Coefficients of `h + h″`, i.e. multiply harmonic `n` by `1 − n²`.
    pub fn plus_second_derivative(&self) -> Self {
        let mut out = self.clone();
        for n in 1..=self.harmonic_count() {
            let k = from_usize::<T>(n);
            let f = T::one() - k * k;
            out.cos[n] = f * self.cos[n];
            out.sin[n] = f * self.sin[n];
        }
        out
    }

    /// `(1/2π) ∫ f² dθ` by Parseval.
    pub fn mean_square(&self) -> T {
        let half = T::one() / (T::one() + T::one());
        let tail: T = (1..=self.harmonic_count())
            .map(|n| self.cos[n] * self.cos[n] + self.sin[n] * self.sin[n])
            .sum();
        self.cos[0] * self.cos[0] + half * tail
    }

    pub fn scale(&mut self, factor: T) {
        for v in self.cos.iter_mut().chain(self.sin.iter_mut()) {
            *v = *v * factor;
        }
    }

    /// `self += factor · other`, other may have fewer harmonics.
    pub fn add_scaled(&mut self, factor: T, other: &Self) {
        let n = self.harmonic_count().min(other.harmonic_count());
        for i in 0..=n {
            self.cos[i] = self.cos[i] + factor * other.cos[i];
            self.sin[i] = self.sin[i] + factor * other.sin[i];
        }
    }

    pub fn max_abs_coefficient_diff(&self, other: &Self) -> T {
        let n = self.harmonic_count().max(other.harmonic_count());
        let a = self.resized(n);
        let b = other.resized(n);
        a.cos
            .iter()
            .zip(&b.cos)
            .chain(a.sin.iter().zip(&b.sin))
            .map(|(x, y)| (*x - *y).abs())
            .fold(T::zero(), T::max)
    }
}

/// FFT plans for one equispaced grid of `size` nodes `θⱼ = 2πj/size`.
#[derive(Clone)]
pub struct SpectralGrid<T: Real> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for SpectralGrid<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralGrid").field("size", &self.size).finish()
    }
}

impl<T: Real> SpectralGrid<T> {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn node(&self, j: usize) -> T {
        T::TAU() * from_usize::<T>(j) / from_usize::<T>(self.size)
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.size).map(|j| self.node(j)).collect()
    }

    /// Values of the series at every node. Harmonics at or above the Nyquist index are ignored.
    pub fn synthesize(&self, h: &Harmonics<T>) -> Vec<T> {
        let half = T::one() / (T::one() + T::one());
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.size];
        buf[0] = Complex::new(h.cos[0], T::zero());
        let top = h.harmonic_count().min((self.size - 1) / 2);
        for n in 1..=top {
            let c = Complex::new(h.cos[n] * half, -h.sin[n] * half);
            buf[n] = c;
            buf[self.size - n] = c.conj();
        }
        self.inverse.process(&mut buf);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Least-squares harmonics (exact interpolation below Nyquist) of grid samples.
    pub fn analyze(&self, values: &[T], harmonic_count: usize) -> Harmonics<T> {
        assert_eq!(values.len(), self.size, "sample count must match grid size");
        let mut buf: Vec<Complex<T>> = values
            .iter()
            .map(|&v| Complex::new(v, T::zero()))
            .collect();
        self.forward.process(&mut buf);
        let inv = T::one() / from_usize::<T>(self.size);
        let two = T::one() + T::one();
        let mut out = Harmonics::zeros(harmonic_count);
        out.cos[0] = buf[0].re * inv;
        let top = harmonic_count.min((self.size - 1) / 2);
        for n in 1..=top {
            out.cos[n] = two * buf[n].re * inv;
            out.sin[n] = -two * buf[n].im * inv;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sample() -> Harmonics<f64> {
        let mut h = Harmonics::zeros(5);
        h.cos[0] = 1.0;
        h.cos[2] = 0.1;
        h.sin[3] = -0.05;
        h.cos[5] = 0.01;
        h
    }

    #[test]
    fn pointwise_derivatives_match_closed_form() {
        let h = sample();
        let t = 0.7;
        let [v, d1, d2, d3] = h.eval_derivatives(t);
        let f = |t: f64| 1.0 + 0.1 * (2.0 * t).cos() - 0.05 * (3.0 * t).sin() + 0.01 * (5.0 * t).cos();
        let f1 = |t: f64| -0.2 * (2.0 * t).sin() - 0.15 * (3.0 * t).cos() - 0.05 * (5.0 * t).sin();
        let f2 = |t: f64| -0.4 * (2.0 * t).cos() + 0.45 * (3.0 * t).sin() - 0.25 * (5.0 * t).cos();
        let f3 = |t: f64| 0.8 * (2.0 * t).sin() + 1.35 * (3.0 * t).cos() + 1.25 * (5.0 * t).sin();
        assert!((v - f(t)).abs() < 1e-14);
        assert!((d1 - f1(t)).abs() < 1e-14);
        assert!((d2 - f2(t)).abs() < 1e-14);
        assert!((d3 - f3(t)).abs() < 1e-13);
    }

    #[test]
    fn synthesize_then_analyze_is_identity() {
        let h = sample();
        let grid = SpectralGrid::<f64>::new(32);
        let values = grid.synthesize(&h);
        for (j, v) in values.iter().enumerate() {
            assert!((v - h.eval(grid.node(j))).abs() < 1e-14);
        }
        let back = grid.analyze(&values, 5);
        assert!(back.max_abs_coefficient_diff(&h) < 1e-15);
    }

    #[test]
    fn derivative_operator_agrees_with_pointwise() {
        let h = sample();
        let d = h.derivative();
        let r = h.plus_second_derivative();
        for k in 0..7 {
            let t = k as f64 * PI / 3.3;
            let [v, d1, d2, _] = h.eval_derivatives(t);
            assert!((d.eval(t) - d1).abs() < 1e-14);
            assert!((r.eval(t) - (v + d2)).abs() < 1e-14);
        }
    }

    #[test]
    fn parseval_mean_square() {
        let h = sample();
        let grid = SpectralGrid::<f64>::new(64);
        let values = grid.synthesize(&h);
        let direct = values.iter().map(|v| v * v).sum::<f64>() / 64.0;
        assert!((direct - h.mean_square()).abs() < 1e-14);
    }
}
