//! Geodesic-flow experiments on negatively curved surfaces with cusps.
//!
//! The crate provides two Riemannian backends sharing one chart interface:
//! an exact constant-curvature upper-half-plane model acted on by the
//! integer Möbius group, and a diagonal cusp-model surface whose curvature
//! blows up at a finite-distance boundary point. On top of the backends it
//! implements piecewise-geodesic concatenations with exterior-angle
//! bookkeeping, chord boundary-value solving, twisting of cusp-bound
//! geodesics, chord-shadowing bounds, a chordal-limit pipeline that
//! produces tangents filling out the unit tangent bundle, and a suite of
//! closed-geodesic / symbolic-dynamics censuses with recurrence and area
//! experiments.
//!
//! All operations are pure functions over immutable values; experiment
//! runners parallelize over trials with per-trial deterministic RNG
//! streams, so every result is reproducible from its seed.

pub mod concat;
pub mod dense;
pub mod error;
pub mod exp;
pub mod hyp;
pub mod metric;
pub mod quad;
pub mod shadow;
pub mod spectrum;
pub mod tol;
pub mod twist;

pub use error::{Error, Result};
pub use hyp::moebius::MappingClassElement;
pub use hyp::point::{BoundaryPoint, HalfPlanePoint, UnitTangent};
pub use metric::{ChartPoint, MetricBackend};
