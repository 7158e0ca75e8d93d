//! Normalized curve-shortening flow `h_t = h − k` in support-function form.

use crate::error::{Error, Result};
use crate::geometry::SupportCurve;
use crate::numerics::linear_fit;
use crate::scalar::{from_usize, lit, Real};
use crate::spectral::{Harmonics, SpectralGrid};

/// Norms below this are treated as round-off when fitting decay rates.
pub const DECAY_NOISE_FLOOR: f64 = 1e-11;
/// Norms above this are outside the asymptotic regime.
pub const DECAY_CEILING: f64 = 0.2;

/// A curve stamped with normalized time.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState<T: Real> {
    pub t: T,
    pub curve: SupportCurve<T>,
}

impl<T: Real> FlowState<T> {
    pub fn new(t: T, curve: SupportCurve<T>) -> Self {
        Self { t, curve }
    }

    /// State at time `t` for `curve` moved into the flow's gauge: first harmonics removed
    /// and uniformly rescaled to area π.
    pub fn normalized(t: T, curve: &SupportCurve<T>) -> Result<Self> {
        let mut h = curve.harmonics().clone();
        project(&mut h)?;
        Ok(Self::new(t, curve.with_harmonics(h)?))
    }
}

/// Per-snapshot diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowDiagnostics<T> {
    pub t: T,
    pub area: T,
    pub entropy: T,
    /// `∫ log h dθ`.
    pub w: T,
    /// `‖k − 1‖∞` on the grid.
    pub knorm: T,
    /// `‖k′‖∞` on the grid.
    pub kprimenorm: T,
}

impl<T: Real> FlowDiagnostics<T> {
    pub fn of(state: &FlowState<T>) -> Self {
        let s = state.curve.grid_sample();
        let mut knorm = T::zero();
        let mut kprimenorm = T::zero();
        for (r, dr) in s.radius.iter().zip(&s.dradius) {
            knorm = knorm.max((T::one() / *r - T::one()).abs());
            kprimenorm = kprimenorm.max((*dr / (*r * *r)).abs());
        }
        Self {
            t: state.t,
            area: state.curve.area(),
            entropy: state.curve.entropy(),
            w: state.curve.log_support_integral(),
            knorm,
            kprimenorm,
        }
    }
}

/// Time-ordered snapshots of one flow run.
#[derive(Debug, Clone)]
pub struct FlowTrajectory<T: Real> {
    pub states: Vec<FlowState<T>>,
    pub step_size: T,
    pub diagnostics: Vec<FlowDiagnostics<T>>,
}

impl<T: Real> FlowTrajectory<T> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> &FlowState<T> {
        &self.states[0]
    }

    pub fn last(&self) -> &FlowState<T> {
        self.states.last().expect("trajectory has at least one state")
    }

    pub fn times(&self) -> Vec<T> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Index of the snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: T) -> usize {
        let mut best = 0;
        for (j, s) in self.states.iter().enumerate() {
            if (s.t - t).abs() < (self.states[best].t - t).abs() {
                best = j;
            }
        }
        best
    }
}

/// Exact area of a truncated series: `π[a₀² + ½ Σ (1 − n²)(aₙ² + bₙ²)]`.
pub fn spectral_area<T: Real>(h: &Harmonics<T>) -> T {
    let half = lit::<T>(0.5);
    let mut acc = h.cos[0] * h.cos[0];
    for n in 1..=h.harmonic_count() {
        let k = from_usize::<T>(n);
        acc = acc + half * (T::one() - k * k) * (h.cos[n] * h.cos[n] + h.sin[n] * h.sin[n]);
    }
    acc * T::PI()
}

/// Stepping parameters for the normalized flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSolver<T> {
    /// Constant `c` in the substep bound `dt ≤ c·(min R)²/N²`.
    pub stability: T,
    /// Normalized-time spacing of recorded snapshots.
    pub snapshot_stride: T,
    /// Allowed `|area − π|` along a trajectory.
    pub area_tolerance: T,
    /// When set, trailing harmonics below this fraction of `a₀` are dropped after each
    /// step of [`FlowSolver::evolve`], which relaxes the substep bound as the curve rounds.
    pub truncation: Option<T>,
}

impl<T: Real> Default for FlowSolver<T> {
    fn default() -> Self {
        Self {
            stability: lit(0.5),
            snapshot_stride: lit(0.05),
            area_tolerance: lit(1e-10),
            truncation: None,
        }
    }
}

/// Grid used for the nonlinear term: twice the curve's grid.
fn padded_grid<T: Real>(curve: &SupportCurve<T>) -> SpectralGrid<T> {
    SpectralGrid::new(2 * curve.grid_size())
}

fn field_on<T: Real>(h: &Harmonics<T>, grid: &SpectralGrid<T>) -> Result<Harmonics<T>> {
    let hv = grid.synthesize(h);
    let rv = grid.synthesize(&h.plus_second_derivative());
    let mut out = Vec::with_capacity(hv.len());
    for (j, (a, r)) in hv.iter().zip(&rv).enumerate() {
        if !(*r > T::zero()) {
            return Err(Error::ConvexityLoss {
                theta: grid.node(j).to_f64().unwrap_or(f64::NAN),
                radius: r.to_f64().unwrap_or(f64::NAN),
            });
        }
        out.push(*a - T::one() / *r);
    }
    Ok(grid.analyze(&out, h.harmonic_count()))
}

/// Spectral coefficients of `h − 1/R`, with `1/R` evaluated on a 2× padded grid.
pub fn time_derivative<T: Real>(curve: &SupportCurve<T>) -> Result<Harmonics<T>> {
    field_on(curve.harmonics(), &padded_grid(curve))
}

fn project<T: Real>(h: &mut Harmonics<T>) -> Result<()> {
    if h.harmonic_count() >= 1 {
        h.cos[1] = T::zero();
        h.sin[1] = T::zero();
    }
    let area = spectral_area(h);
    let factor = (T::PI() / area).sqrt();
    if !(factor >= lit(0.5) && factor <= lit(2.0)) {
        return Err(Error::AreaProjection {
            factor: factor.to_f64().unwrap_or(f64::NAN),
        });
    }
    h.scale(factor);
    Ok(())
}

fn rk4_on<T: Real>(h: &Harmonics<T>, dt: T, grid: &SpectralGrid<T>) -> Result<Harmonics<T>> {
    let half = dt * lit(0.5);
    let k1 = field_on(h, grid)?;
    let mut y = h.clone();
    y.add_scaled(half, &k1);
    let k2 = field_on(&y, grid)?;
    let mut y = h.clone();
    y.add_scaled(half, &k2);
    let k3 = field_on(&y, grid)?;
    let mut y = h.clone();
    y.add_scaled(dt, &k3);
    let k4 = field_on(&y, grid)?;
    let sixth = dt / lit(6.0);
    let mut next = h.clone();
    next.add_scaled(sixth, &k1);
    next.add_scaled(sixth + sixth, &k2);
    next.add_scaled(sixth + sixth, &k3);
    next.add_scaled(sixth, &k4);
    project(&mut next)?;
    Ok(next)
}

impl<T: Real> FlowSolver<T> {
    /// Largest substep allowed for `curve`.
    pub fn max_substep(&self, curve: &SupportCurve<T>) -> T {
        let r = curve.min_radius();
        let n = from_usize::<T>(curve.harmonic_count().max(1));
        self.stability * r * r / (n * n)
    }

    /// One classical RK4 step of size `dt` followed by gauge fixing and area projection.
    /// No stability check is made.
    pub fn rk4_substep(&self, state: &FlowState<T>, dt: T) -> Result<FlowState<T>> {
        let grid = padded_grid(&state.curve);
        let h = rk4_on(state.curve.harmonics(), dt, &grid).map_err(|e| e.at_time(f64_of(state.t)))?;
        let curve = state.curve.with_harmonics(h).map_err(|e| e.at_time(f64_of(state.t + dt)))?;
        Ok(FlowState::new(state.t + dt, curve))
    }

    /// Advances by `dt`, splitting into equal substeps that respect the stability bound.
    pub fn step(&self, state: &FlowState<T>, dt: T) -> Result<FlowState<T>> {
        if !(dt > T::zero()) || !dt.is_finite() {
            return Err(Error::invalid("dt", "must be positive and finite"));
        }
        let bound = self.max_substep(&state.curve);
        let count = (dt / bound).ceil().to_usize().unwrap_or(1).max(1);
        let sub = dt / from_usize::<T>(count);
        let grid = padded_grid(&state.curve);
        let mut h = state.curve.harmonics().clone();
        for i in 0..count {
            let t = state.t + sub * from_usize::<T>(i);
            h = rk4_on(&h, sub, &grid).map_err(|e| e.at_time(f64_of(t)))?;
        }
        let t = state.t + dt;
        let curve = state.curve.with_harmonics(h).map_err(|e| e.at_time(f64_of(t)))?;
        Ok(FlowState::new(t, curve))
    }

    /// Runs from `state.t` to `t_target` in steps of `dt`, recording a snapshot every
    /// `snapshot_stride` units of time and at the end. The initial state is normalized
    /// first (see [`FlowState::normalized`]) and recorded in that form.
    pub fn evolve(&self, state: &FlowState<T>, t_target: T, dt: T) -> Result<FlowTrajectory<T>> {
        if !(t_target > state.t) {
            return Err(Error::invalid("t_target", "must exceed the initial time"));
        }
        if !(dt > T::zero()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        let span = t_target - state.t;
        let steps = (span / dt).ceil().to_usize().unwrap_or(1).max(1);
        let stride = (self.snapshot_stride / dt).round().to_usize().unwrap_or(1).max(1);
        let start = FlowState::normalized(state.t, &state.curve).map_err(|e| e.at_time(f64_of(state.t)))?;
        let mut states = vec![start.clone()];
        let mut current = start;
        for i in 1..=steps {
            let t_next = if i == steps {
                t_target
            } else {
                state.t + dt * from_usize::<T>(i)
            };
            let mut next = self.step(&current, t_next - current.t)?;
            next.t = t_next;
            if let Some(tol) = self.truncation {
                next.curve = truncate_tail(&next.curve, tol).map_err(|e| e.at_time(f64_of(t_next)))?;
            }
            current = next;
            if i % stride == 0 || i == steps {
                states.push(current.clone());
            }
        }
        let diagnostics: Vec<_> = states.iter().map(FlowDiagnostics::of).collect();
        for d in &diagnostics {
            if (d.area - T::PI()).abs() > self.area_tolerance {
                return Err(Error::AreaProjection {
                    factor: (T::PI() / d.area).sqrt().to_f64().unwrap_or(f64::NAN),
                }
                .at_time(f64_of(d.t)));
            }
        }
        Ok(FlowTrajectory {
            states,
            step_size: dt,
            diagnostics,
        })
    }
}

/// Smallest harmonic budget, at least 8, keeping every coefficient above `tol·a₀`; the
/// curve is re-gridded only when this at least quarters the trailing work.
pub fn truncate_tail<T: Real>(curve: &SupportCurve<T>, tol: T) -> Result<SupportCurve<T>> {
    let h = curve.harmonics();
    let n = h.harmonic_count();
    let floor = tol * h.cos[0].abs();
    let mut keep = n;
    while keep > 8 && h.cos[keep].abs() < floor && h.sin[keep].abs() < floor {
        keep -= 1;
    }
    if 4 * keep <= 3 * n {
        curve.with_harmonic_count(keep)
    } else {
        Ok(curve.clone())
    }
}

fn f64_of<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Least-squares slopes of `log‖k − 1‖∞` and `log‖k′‖∞` against `t` over the asymptotic
/// tail (norms between the noise floor and the ceiling).
pub fn decay_rates<T: Real>(trajectory: &FlowTrajectory<T>) -> Result<(T, T)> {
    decay_rates_between(trajectory, T::neg_infinity(), T::infinity())
}

/// [`decay_rates`] restricted to snapshots with `t_lo ≤ t ≤ t_hi`.
pub fn decay_rates_between<T: Real>(trajectory: &FlowTrajectory<T>, t_lo: T, t_hi: T) -> Result<(T, T)> {
    let floor = lit::<T>(DECAY_NOISE_FLOOR);
    let ceiling = lit::<T>(DECAY_CEILING);
    let window: Vec<_> = trajectory
        .diagnostics
        .iter()
        .filter(|d| d.t >= t_lo && d.t <= t_hi)
        .collect();
    let fit = |sel: &dyn Fn(&FlowDiagnostics<T>) -> T| -> Result<T> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for d in &window {
            let v = sel(d);
            if v > floor && v < ceiling {
                xs.push(d.t);
                ys.push(v.ln());
            }
        }
        if xs.len() < 10 {
            return Err(Error::TooFewStates {
                found: xs.len(),
                needed: 10,
            });
        }
        Ok(linear_fit(&xs, &ys).0)
    };
    Ok((fit(&|d| d.knorm)?, fit(&|d| d.kprimenorm)?))
}
