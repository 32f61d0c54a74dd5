//! Exact geometry of the upper half-plane with the integer Möbius group.
//!
//! Points are `x + iy` with `y > 0`; the metric is `(dx² + dy²)/y²`, with
//! constant curvature −1. Geodesics are vertical half-lines and
//! semicircles orthogonal to the real axis. The boundary circle
//! `ℝ ∪ {∞}` carries the cusps: extended rationals, permuted by the
//! integer Möbius group. Distances, angles, projections, the geodesic
//! flow, and triangle solving all have closed forms, which makes this
//! backend the exactness oracle for every numerical component in the
//! crate.
//!
//! Conventions used throughout:
//! - tangent directions are angles from the vertical, counterclockwise,
//!   normalized to (−π, π]; the vector of direction `d` is
//!   `(−sin d, cos d)`;
//! - the distance between `z` and `w` is computed as
//!   `2·asinh(|z − w| / (2√(Im z · Im w)))`, which is exact and stable for
//!   both tiny and huge separations;
//! - boundary points record exact integer ratios when the caller supplies
//!   them; nothing ever recovers a rational from a float.

pub mod fn_coords;
pub mod geodesic;
pub mod moebius;
pub mod point;
pub mod reduce;
pub mod triangle;

pub use fn_coords::{dehn_twist_fn, FNPoint};
pub use geodesic::{
    angle_between, dist, flow, geodesic_between, project_to_geodesic, project_to_segment,
    CompleteGeodesic, Geodesic, GeodesicSegment, Projection,
};
pub use moebius::{MappingClassElement, RealMoebius};
pub use point::{BoundaryPoint, ExtendedReal, HalfPlanePoint, Rational, UnitTangent};
pub use reduce::{in_fundamental_domain, reduce_to_fundamental_domain};
pub use triangle::triangle_opposite_side;

/// Wraps an angle to the half-open interval (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(std::f64::consts::TAU);
    if r > std::f64::consts::PI {
        r -= std::f64::consts::TAU;
    }
    r
}
