use thiserror::Error;

/// Errors raised by curve construction, the flow integrator and the orbit solvers.
///
/// Numeric payloads are stored as `f64` whatever the working scalar type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("convexity lost: R = {radius:e} at θ = {theta}")]
    ConvexityLoss { theta: f64, radius: f64 },

    #[error("origin not strictly inside the curve: h = {support:e} at θ = {theta}")]
    OriginOutside { theta: f64, support: f64 },

    #[error("harmonic {0} is even and would break constant width")]
    EvenHarmonic(usize),

    #[error("area projection factor {factor} outside [0.5, 2]")]
    AreaProjection { factor: f64 },

    #[error("flow failed at t = {t}: {source}")]
    Flow {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("grazing incidence φ = {phi:e} at bounce {bounce}")]
    Grazing { phi: f64, bounce: usize },

    #[error("no sign change bracketing the root of {0}")]
    Bracket(&'static str),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("chord integral {integral} disagrees with Euclidean chord {distance}")]
    InconsistentChord { integral: f64, distance: f64 },

    #[error("coincident boundary points at θ = {0}")]
    Coincident(f64),

    #[error("only {found} asymptotic states, need at least {needed}")]
    TooFewStates { found: usize, needed: usize },

    #[error("θ = {theta} is not a period-two root (|f| = {residual:e})")]
    NotARoot { theta: f64, residual: f64 },

    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutsideSpan { t: f64, start: f64, end: f64 },

    #[error("orbit does not close: residual {0:e}")]
    OpenOrbit(f64),

    #[error("wavefront critical point at θ = {theta} after {m} bounces (A′ = 0)")]
    WavefrontCritical { m: usize, theta: f64 },

    #[error("{m} bounces exceed the limit of {limit}")]
    TooManyBounces { m: usize, limit: usize },

    #[error("midpoint solve failed for pair {index}: {source}")]
    Midpoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no hyperbolic caustics: λ-interval ({b}, {a}) is empty")]
    NoHyperbolicCaustics { a: f64, b: f64 },

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed document {path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attaches the flow time at which a step failed.
    pub fn at_time(self, t: f64) -> Self {
        match self {
            e @ Error::Flow { .. } => e,
            e => Error::Flow {
                t,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
