//! Convex ovals under the normalized curve-shortening flow, and the periodic structures of
//! their billiard maps: period-two diameters, normal periodic orbits with their focusing
//! envelopes, and resonant hyperbolic caustics of the ellipse.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the `*64` aliases below fix `f64`.

// negated comparisons are kept on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod billiard;
pub mod elliptic;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod melnikov;
pub mod normal;
pub mod numerics;
pub mod periodic;
pub mod scalar;
pub mod spectral;

pub use billiard::{BounceRecord, PhasePoint};
pub use error::{Error, Result};
pub use flow::{FlowDiagnostics, FlowSolver, FlowState, FlowTrajectory};
pub use geometry::{make_circle, make_constant_width, make_ellipse, PlanePoint, SupportCurve};
pub use melnikov::{CausticResonance, EllipseParams, MelnikovCurve};
pub use normal::{DiffeoCertificate, NormalOrbit, NormalOrbitSet};
pub use periodic::{DiameterBranch, DiameterOrbit, DiameterSet, OrbitClass};
pub use scalar::Real;
pub use spectral::Harmonics;

pub type Curve64 = SupportCurve<f64>;
pub type Curve32 = SupportCurve<f32>;
pub type Point64 = PlanePoint<f64>;
pub type Phase64 = PhasePoint<f64>;
pub type State64 = FlowState<f64>;
pub type Trajectory64 = FlowTrajectory<f64>;
pub type Solver64 = FlowSolver<f64>;
pub type Ellipse64 = EllipseParams<f64>;
pub type Resonance64 = CausticResonance<f64>;
