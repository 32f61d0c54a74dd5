//! Central numeric tolerances and solver limits.
//!
//! Every module reads its tolerances from here so that the accuracy
//! contract of the whole crate is visible in one place. Values are chosen
//! for double precision with well-conditioned closed forms: geometric
//! incidence sits a little above f64 round-off, solver targets sit two to
//! three orders above that, and report-level tolerances dominate the
//! discretization noise of the default sampling resolutions.

/// Point/curve incidence and endpoint matching, in hyperbolic length.
pub const TOL_GEOM: f64 = 1e-9;

/// Allowed drift of |g(v, v) - 1| along integrated unit-speed paths.
pub const TOL_NORM: f64 = 1e-8;

/// Chord boundary-value solver endpoint target, in chart units.
pub const TOL_BVP: f64 = 1e-8;

/// Slack for first-derivative bounds on distance profiles.
pub const TOL_DERIV: f64 = 1e-3;

/// Allowed negative second difference when checking per-segment convexity.
pub const TOL_CONV: f64 = 1e-6;

/// Cauchy-gap threshold below which a chordal limit tangent is declared.
pub const TOL_LIMIT: f64 = 1e-2;

/// Relative local error target of the adaptive integrator.
pub const ODE_RTOL: f64 = 1e-10;

/// Absolute local error target of the adaptive integrator.
pub const ODE_ATOL: f64 = 1e-12;

/// Smallest step the adaptive integrator may take before giving up.
pub const ODE_STEP_FLOOR: f64 = 1e-12;

/// Largest step the adaptive integrator may take (keeps samples dense
/// enough for cubic-Hermite interpolation between them).
pub const ODE_STEP_MAX: f64 = 0.1;

/// Iteration cap for fundamental-domain reduction.
pub const REDUCE_CAP: usize = 10_000;

/// Baseline distance-profile resolution, samples per unit arclength.
pub const PROFILE_SAMPLES_PER_UNIT: usize = 512;

/// Profile resolution is doubled until max F moves less than this.
pub const PROFILE_STABILIZE: f64 = 1e-4;

/// Cap on the twist exponent searched when meeting an angle budget.
pub const TWIST_CAP: i64 = 1_000_000;
