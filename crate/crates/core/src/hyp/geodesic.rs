use serde::{Deserialize, Serialize};

use super::moebius::RealMoebius;
use super::point::{BoundaryPoint, HalfPlanePoint, UnitTangent};
use super::wrap_angle;
use crate::error::{Error, Result};
use crate::tol::TOL_GEOM;

/// A complete geodesic of the half-plane: a vertical half-line or a
/// semicircle orthogonal to the real axis.
///
/// Arcs are parameterized by the circle angle φ ∈ (0, π) at the center,
/// `z(φ) = (center + radius·cos φ, radius·sin φ)`. The arclength
/// coordinate along an arc is `σ(φ) = ln tan(φ/2)` (unit speed,
/// increasing with φ); along a vertical line it is `σ = ln y`. In the
/// forward (+σ) orientation the tangent direction angle at circle angle φ
/// equals φ itself, which keeps angle bookkeeping closed-form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Geodesic {
    Vertical { x: f64 },
    Arc { center: f64, radius: f64 },
}

impl Geodesic {
    /// The complete geodesic through two distinct interior points.
    pub fn through(p: &HalfPlanePoint, q: &HalfPlanePoint) -> Result<Self> {
        if p.chart_dist(q) <= TOL_GEOM {
            return Err(Error::DegenerateChord);
        }
        if (p.x() - q.x()).abs() <= TOL_GEOM {
            return Ok(Geodesic::Vertical { x: p.x() });
        }
        let center = (q.x() * q.x() + q.y() * q.y() - p.x() * p.x() - p.y() * p.y())
            / (2.0 * (q.x() - p.x()));
        let radius = (p.x() - center).hypot(p.y());
        Ok(Geodesic::Arc { center, radius })
    }

    /// The complete geodesic through a unit tangent; the tangent points in
    /// the +orientation direction of the returned `(geodesic, forward)`
    /// pair, where `forward` is true when the tangent points in +σ.
    pub fn through_tangent(t: &UnitTangent) -> (Self, bool) {
        let d = t.dir();
        let near_vertical = d.abs() <= 1e-12 || (std::f64::consts::PI - d.abs()) <= 1e-12;
        if near_vertical {
            let forward = d.abs() <= 1e-12;
            return (Geodesic::Vertical { x: t.base.x() }, forward);
        }
        let forward = d > 0.0;
        let phi = if forward { d } else { wrap_angle(d + std::f64::consts::PI) };
        let radius = t.base.y() / phi.sin();
        let center = t.base.x() - radius * phi.cos();
        (Geodesic::Arc { center, radius }, forward)
    }

    /// Ideal endpoints in (−σ, +σ) order.
    pub fn ends(&self) -> (BoundaryPoint, BoundaryPoint) {
        match self {
            Geodesic::Vertical { x } => (BoundaryPoint::from_real(*x), BoundaryPoint::infinity()),
            Geodesic::Arc { center, radius } => (
                BoundaryPoint::from_real(center + radius),
                BoundaryPoint::from_real(center - radius),
            ),
        }
    }

    /// σ-coordinate of a point assumed to lie on the geodesic.
    pub fn sigma_of(&self, p: &HalfPlanePoint) -> f64 {
        match self {
            Geodesic::Vertical { .. } => p.y().ln(),
            Geodesic::Arc { center, radius } => {
                // tan(φ/2) = y / (radius + (x − center)), stable for φ near 0;
                // for φ near π the complementary form keeps full precision.
                let dx = p.x() - center;
                if dx >= 0.0 {
                    (p.y() / (radius + dx)).ln()
                } else {
                    ((radius - dx) / p.y()).ln()
                }
            }
        }
    }

    /// Point at σ-coordinate `sigma`.
    pub fn point_at_sigma(&self, sigma: f64) -> HalfPlanePoint {
        match self {
            Geodesic::Vertical { x } => {
                HalfPlanePoint::new(*x, sigma.exp()).expect("exp is positive")
            }
            Geodesic::Arc { center, radius } => {
                // With σ = ln tan(φ/2): cos φ = −tanh σ, sin φ = 1/cosh σ,
                // stable for every σ; the height is clamped to the smallest
                // positive double in the (far out of working range) regime
                // where sech underflows.
                let cos_phi = -sigma.tanh();
                let sin_phi = 1.0 / sigma.cosh();
                let y = (radius * sin_phi).max(f64::MIN_POSITIVE);
                HalfPlanePoint::new(center + radius * cos_phi, y)
                    .expect("interior of the arc stays in the half-plane")
            }
        }
    }

    /// Unit tangent at σ-coordinate `sigma`, in ±σ orientation.
    pub fn tangent_at_sigma(&self, sigma: f64, forward: bool) -> UnitTangent {
        let base = self.point_at_sigma(sigma);
        let dir = match self {
            Geodesic::Vertical { .. } => {
                if forward {
                    0.0
                } else {
                    std::f64::consts::PI
                }
            }
            Geodesic::Arc { center, .. } => {
                let phi = f64::atan2(base.y(), base.x() - center);
                if forward {
                    phi
                } else {
                    wrap_angle(phi + std::f64::consts::PI)
                }
            }
        };
        UnitTangent::new(base, dir)
    }

    /// Closed-form distance from a point to the complete geodesic:
    /// `sinh d = |x − x₀|/y` for vertical lines and
    /// `sinh d = | |z − c|² − R² | / (2 R y)` for arcs.
    pub fn dist_to(&self, p: &HalfPlanePoint) -> f64 {
        match self {
            Geodesic::Vertical { x } => ((p.x() - x).abs() / p.y()).asinh(),
            Geodesic::Arc { center, radius } => {
                let dx = p.x() - center;
                let sq = dx * dx + p.y() * p.y() - radius * radius;
                (sq.abs() / (2.0 * radius * p.y())).asinh()
            }
        }
    }
}

/// A complete geodesic together with its ideal endpoints. The endpoints
/// carry exact rational data when the caller supplied it; a geodesic is
/// singular when both endpoints are exact rationals (equivalently: both
/// ends run into cusps).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompleteGeodesic {
    pub geo: Geodesic,
    pub start: BoundaryPoint,
    pub end: BoundaryPoint,
}

impl CompleteGeodesic {
    /// Builds the geodesic from two distinct boundary points, oriented
    /// from `start` to `end`.
    pub fn from_boundary(start: BoundaryPoint, end: BoundaryPoint) -> Result<Self> {
        let geo = match (start.value, end.value) {
            (super::point::ExtendedReal::Infinity, super::point::ExtendedReal::Infinity) => {
                return Err(Error::DegenerateChord)
            }
            (super::point::ExtendedReal::Infinity, super::point::ExtendedReal::Finite(v))
            | (super::point::ExtendedReal::Finite(v), super::point::ExtendedReal::Infinity) => {
                Geodesic::Vertical { x: v }
            }
            (super::point::ExtendedReal::Finite(a), super::point::ExtendedReal::Finite(b)) => {
                if a == b {
                    return Err(Error::DegenerateChord);
                }
                Geodesic::Arc { center: 0.5 * (a + b), radius: 0.5 * (a - b).abs() }
            }
        };
        Ok(Self { geo, start, end })
    }

    pub fn is_singular(&self) -> bool {
        self.start.is_rational() && self.end.is_rational()
    }

    /// True when the forward orientation (start → end) agrees with +σ.
    pub fn forward(&self) -> bool {
        use super::point::ExtendedReal as E;
        match (&self.geo, self.end.value) {
            (Geodesic::Vertical { .. }, E::Infinity) => true,
            (Geodesic::Vertical { .. }, E::Finite(_)) => false,
            // +σ runs toward φ = π, i.e. toward center − radius.
            (Geodesic::Arc { center, .. }, E::Finite(e)) => e < *center,
            (Geodesic::Arc { .. }, E::Infinity) => unreachable!("arcs have finite endpoints"),
        }
    }
}

/// A unit-speed geodesic segment between two interior points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub geo: Geodesic,
    pub start: HalfPlanePoint,
    pub end: HalfPlanePoint,
    pub length: f64,
    sigma_start: f64,
    orientation: f64,
}

impl GeodesicSegment {
    pub fn new(p: HalfPlanePoint, q: HalfPlanePoint) -> Result<Self> {
        let geo = Geodesic::through(&p, &q)?;
        let (s0, s1) = (geo.sigma_of(&p), geo.sigma_of(&q));
        Ok(Self {
            geo,
            start: p,
            end: q,
            length: dist(&p, &q),
            sigma_start: s0,
            orientation: if s1 >= s0 { 1.0 } else { -1.0 },
        })
    }

    /// Point at arclength `s ∈ [0, length]` from the start. At the two
    /// ends this returns the stored endpoints bitwise: recomputing them
    /// through the arc parametrization loses precision on eccentric arcs,
    /// and junction checks rely on stored endpoints matching exactly.
    pub fn point_at(&self, s: f64) -> HalfPlanePoint {
        if s <= 0.0 {
            return self.start;
        }
        if s >= self.length {
            return self.end;
        }
        self.geo.point_at_sigma(self.sigma_start + self.orientation * s)
    }

    /// Unit tangent at arclength `s`, pointing from start toward end.
    /// Based at the stored endpoints at the two ends (see [`Self::point_at`]);
    /// the direction is a well-conditioned function of σ either way.
    pub fn tangent_at(&self, s: f64) -> UnitTangent {
        if s >= self.length {
            let d = self.geo.tangent_at_sigma(self.geo.sigma_of(&self.end), self.orientation > 0.0);
            return UnitTangent::new(self.end, d.dir());
        }
        if s <= 0.0 {
            let d =
                self.geo.tangent_at_sigma(self.geo.sigma_of(&self.start), self.orientation > 0.0);
            return UnitTangent::new(self.start, d.dir());
        }
        self.geo.tangent_at_sigma(self.sigma_start + self.orientation * s, self.orientation > 0.0)
    }

    pub fn reversed(&self) -> Self {
        Self {
            geo: self.geo,
            start: self.end,
            end: self.start,
            length: self.length,
            sigma_start: self.sigma_start + self.orientation * self.length,
            orientation: -self.orientation,
        }
    }

    /// The sub-segment between arclengths `s0 < s1`.
    pub fn slice(&self, s0: f64, s1: f64) -> Result<Self> {
        GeodesicSegment::new(self.point_at(s0), self.point_at(s1))
    }
}

/// Hyperbolic distance, `2·asinh(|z − w| / (2√(y_z · y_w)))` — exact and
/// stable across all separations.
pub fn dist(p: &HalfPlanePoint, q: &HalfPlanePoint) -> f64 {
    let chord = (p.x() - q.x()).hypot(p.y() - q.y());
    2.0 * (chord / (2.0 * (p.y() * q.y()).sqrt())).asinh()
}

/// The unit-speed segment from `p` to `q`.
pub fn geodesic_between(p: &HalfPlanePoint, q: &HalfPlanePoint) -> Result<GeodesicSegment> {
    GeodesicSegment::new(*p, *q)
}

/// Metric angle in [0, π] between two unit tangents at a common base
/// (the metric is conformal, so this is the chart angle).
pub fn angle_between(u: &UnitTangent, v: &UnitTangent) -> Result<f64> {
    let gap = dist(&u.base, &v.base);
    if gap > TOL_GEOM {
        return Err(Error::BaseMismatch { gap });
    }
    Ok(wrap_angle(u.dir() - v.dir()).abs())
}

/// Result of a nearest-point projection: the foot, the distance, and the
/// unit tangent at the queried point pointing away from the target along
/// the orthogonal fiber (the gradient of the distance function; the
/// distance to the target grows at rate cos(angle to this direction)).
#[derive(Debug, Clone, Copy)]
pub struct Projection {
    pub foot: HalfPlanePoint,
    pub away: UnitTangent,
    pub dist: f64,
    /// False when a segment projection clamped to an endpoint.
    pub interior: bool,
}

/// Nearest-point projection onto a complete geodesic.
pub fn project_to_geodesic(p: &HalfPlanePoint, g: &Geodesic) -> Projection {
    match g {
        Geodesic::Vertical { x } => project_to_vertical(p, *x),
        Geodesic::Arc { center, radius } => {
            // Send the arc to the imaginary axis by the positive-determinant
            // map z ↦ (z − (c − R)) / (−z + (c + R)), project, pull back.
            let m = RealMoebius::new(1.0, radius - center, -1.0, center + radius)
                .expect("determinant 2R > 0");
            let proj = project_to_vertical(&m.apply(p), 0.0);
            let inv = m.inverse();
            Projection {
                foot: inv.apply(&proj.foot),
                away: inv.apply_tangent(&proj.away),
                dist: proj.dist,
                interior: true,
            }
        }
    }
}

fn project_to_vertical(p: &HalfPlanePoint, x0: f64) -> Projection {
    let dx = p.x() - x0;
    let r = dx.hypot(p.y());
    let foot = HalfPlanePoint::new(x0, r).expect("foot has positive height");
    let phi = f64::atan2(p.y(), dx);
    // Along the fiber circle the +σ tangent at circle angle φ has direction
    // angle φ; distance to the line grows away from φ = π/2.
    let dir = if dx > 0.0 {
        wrap_angle(phi - std::f64::consts::PI)
    } else if dx < 0.0 {
        phi
    } else {
        -std::f64::consts::FRAC_PI_2
    };
    Projection {
        foot,
        away: UnitTangent::new(*p, dir),
        dist: (dx.abs() / p.y()).asinh(),
        interior: true,
    }
}

/// Nearest-point projection onto a segment; clamps to the nearest endpoint
/// when the geodesic foot falls outside, in which case the away direction
/// is radial from that endpoint.
pub fn project_to_segment(p: &HalfPlanePoint, seg: &GeodesicSegment) -> Projection {
    let proj = project_to_geodesic(p, &seg.geo);
    let sigma = seg.geo.sigma_of(&proj.foot);
    let s = (sigma - seg.sigma_start) * seg.orientation;
    if (0.0..=seg.length).contains(&s) {
        return proj;
    }
    let endpoint = if s < 0.0 { seg.start } else { seg.end };
    let d = dist(p, &endpoint);
    if d <= TOL_GEOM {
        // Queried point sits on the endpoint: the distance is zero and any
        // normal direction works for one-sided derivative bookkeeping.
        let t = if s < 0.0 { seg.tangent_at(0.0) } else { seg.tangent_at(seg.length) };
        return Projection {
            foot: endpoint,
            away: UnitTangent::new(*p, wrap_angle(t.dir() + std::f64::consts::FRAC_PI_2)),
            dist: 0.0,
            interior: false,
        };
    }
    let toward = geodesic_between(p, &endpoint).expect("distinct points").tangent_at(0.0);
    Projection { foot: endpoint, away: toward.reversed(), dist: d, interior: false }
}

/// Closed-form geodesic flow: the unit tangent reached after flowing for
/// time `t` (negative `t` flows backward).
pub fn flow(u: &UnitTangent, t: f64) -> UnitTangent {
    let g = RealMoebius::translation_to(&u.base).compose(&RealMoebius::rotation_at_i(u.dir()));
    let along = UnitTangent::new(
        HalfPlanePoint::new(0.0, t.exp()).expect("exp is positive"),
        0.0,
    );
    g.apply_tangent(&along)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::point::ExtendedReal;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn vertical_distance_is_log_ratio() {
        let d = dist(&pt(0.0, 1.0), &pt(0.0, 2.0));
        assert!((d - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(dist(&pt(0.3, 1.7), &pt(0.3, 1.7)), 0.0);
    }

    #[test]
    fn unit_horizontal_step_distance() {
        // cosh d = 1 + |z−w|²/(2·Im·Im) = 1.5, d = arccosh(1.5).
        let d = dist(&pt(0.0, 1.0), &pt(1.0, 1.0));
        assert!((d - 0.962_423_650_119_206_9).abs() < 1e-15);
    }

    #[test]
    fn distance_is_symmetric() {
        let (p, q) = (pt(-0.4, 0.7), pt(2.2, 3.1));
        assert_eq!(dist(&p, &q), dist(&q, &p));
    }

    #[test]
    fn geodesic_between_vertical_case() {
        let seg = geodesic_between(&pt(0.0, 1.0), &pt(0.0, 2.0)).unwrap();
        assert_eq!(seg.geo, Geodesic::Vertical { x: 0.0 });
        assert!((seg.length - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn geodesic_between_symmetric_arc() {
        let seg = geodesic_between(&pt(-1.0, 1.0), &pt(1.0, 1.0)).unwrap();
        match seg.geo {
            Geodesic::Arc { center, radius } => {
                assert!(center.abs() < 1e-15);
                assert!((radius - std::f64::consts::SQRT_2).abs() < 1e-15);
            }
            _ => panic!("expected an arc"),
        }
    }

    #[test]
    fn degenerate_chord_is_rejected() {
        let p = pt(0.5, 1.5);
        assert!(matches!(geodesic_between(&p, &p), Err(Error::DegenerateChord)));
    }

    #[test]
    fn segment_parameterization_is_unit_speed() {
        let seg = geodesic_between(&pt(-0.7, 0.9), &pt(1.3, 2.4)).unwrap();
        let n = 16;
        for k in 0..n {
            let s0 = seg.length * k as f64 / n as f64;
            let s1 = seg.length * (k + 1) as f64 / n as f64;
            let step = dist(&seg.point_at(s0), &seg.point_at(s1));
            assert!((step - (s1 - s0)).abs() < 1e-12);
        }
        assert!(seg.point_at(0.0).chart_dist(&seg.start) < 1e-12);
        assert!(seg.point_at(seg.length).chart_dist(&seg.end) < 1e-9);
    }

    #[test]
    fn segment_tangent_matches_finite_difference() {
        let seg = geodesic_between(&pt(0.2, 1.1), &pt(-1.4, 0.6)).unwrap();
        let s = 0.37 * seg.length;
        let t = seg.tangent_at(s);
        let h = 1e-6;
        let (p0, p1) = (seg.point_at(s), seg.point_at(s + h));
        let fd = UnitTangent::from_vector(p0, p1.x() - p0.x(), p1.y() - p0.y()).unwrap();
        assert!((wrap_angle(t.dir() - fd.dir())).abs() < 1e-5);
    }

    #[test]
    fn angle_between_axis_and_unit_step_chord() {
        // Independent derivation: the chord i → 1+i lies on the circle with
        // center 1/2 and radius √5/2; the Euclidean tangent at i is (2, 1)/√5,
        // so the angle to the vertical (0, 1) is arccos(1/√5) = 1.10714...
        let i = pt(0.0, 1.0);
        let up = geodesic_between(&i, &pt(0.0, 2.0)).unwrap().tangent_at(0.0);
        let chord = geodesic_between(&i, &pt(1.0, 1.0)).unwrap().tangent_at(0.0);
        let angle = angle_between(&up, &chord).unwrap();
        assert!((angle - 1.107_148_717_794_090_4).abs() < 1e-12);
        assert!((angle - (1.0 / 5.0_f64.sqrt()).acos()).abs() < 1e-12);
    }

    #[test]
    fn angle_between_same_and_opposite() {
        let u = UnitTangent::new(pt(0.4, 2.0), 0.8);
        assert_eq!(angle_between(&u, &u).unwrap(), 0.0);
        let pi = angle_between(&u, &u.reversed()).unwrap();
        assert!((pi - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn angle_between_requires_common_base() {
        let u = UnitTangent::new(pt(0.0, 1.0), 0.0);
        let v = UnitTangent::new(pt(0.5, 1.0), 0.0);
        assert!(matches!(angle_between(&u, &v), Err(Error::BaseMismatch { .. })));
    }

    #[test]
    fn projection_onto_imaginary_axis() {
        let p = pt(1.0, 1.0);
        let proj = project_to_geodesic(&p, &Geodesic::Vertical { x: 0.0 });
        assert!(proj.foot.x().abs() < 1e-15);
        assert!((proj.foot.y() - std::f64::consts::SQRT_2).abs() < 1e-15);
        // Away-from-axis direction at 1+i points down-right along the fiber.
        assert!((proj.away.dir() + 3.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        // sinh d = |x|/y = 1, so d = ln(1 + √2).
        assert!((proj.dist - (1.0 + std::f64::consts::SQRT_2).ln()).abs() < 1e-15);
    }

    #[test]
    fn projection_of_point_on_geodesic_is_itself() {
        let g = Geodesic::Arc { center: 0.5, radius: 2.0 };
        let p = g.point_at_sigma(0.3);
        let proj = project_to_geodesic(&p, &g);
        assert!(proj.dist < 1e-12);
        assert!(proj.foot.chart_dist(&p) < 1e-9);
    }

    #[test]
    fn projection_distance_matches_closed_form() {
        let g = Geodesic::Arc { center: -0.3, radius: 1.7 };
        for (x, y) in [(2.0, 0.5), (-3.0, 2.0), (0.1, 4.0), (1.2, 0.05)] {
            let p = pt(x, y);
            let proj = project_to_geodesic(&p, &g);
            assert!((proj.dist - g.dist_to(&p)).abs() < 1e-11);
            // The foot is on the circle and is the distance minimizer.
            let on = ((proj.foot.x() - -0.3).hypot(proj.foot.y()) - 1.7).abs();
            assert!(on < 1e-9);
            assert!((dist(&p, &proj.foot) - proj.dist).abs() < 1e-9);
        }
    }

    #[test]
    fn segment_projection_clamps_to_endpoint() {
        // The geodesic foot of 1+i on the axis is i√2, above the segment
        // [i, 1.1i]; the nearest segment point is the endpoint 1.1i. Oracle:
        // brute-force minimization over a fine grid along the segment.
        let p = pt(1.0, 1.0);
        let seg = geodesic_between(&pt(0.0, 1.0), &pt(0.0, 1.1)).unwrap();
        let proj = project_to_segment(&p, &seg);
        assert!(!proj.interior);
        assert!(proj.foot.chart_dist(&pt(0.0, 1.1)) < 1e-12);
        let grid_min = (0..=4000)
            .map(|k| dist(&p, &seg.point_at(seg.length * k as f64 / 4000.0)))
            .fold(f64::INFINITY, f64::min);
        assert!((proj.dist - grid_min).abs() < 1e-6);
        assert!(proj.dist > grid_min - 1e-12);
    }

    #[test]
    fn segment_projection_interior_case() {
        let p = pt(0.3, 2.0);
        let seg = geodesic_between(&pt(-1.0, 1.0), &pt(1.0, 1.0)).unwrap();
        let proj = project_to_segment(&p, &seg);
        assert!(proj.interior);
        let grid_min = (0..=4000)
            .map(|k| dist(&p, &seg.point_at(seg.length * k as f64 / 4000.0)))
            .fold(f64::INFINITY, f64::min);
        assert!((proj.dist - grid_min).abs() < 1e-6);
    }

    #[test]
    fn flow_moves_vertically_from_i() {
        let u = UnitTangent::new(pt(0.0, 1.0), 0.0);
        for t in [0.25, 1.0, 3.0] {
            let v = flow(&u, t);
            assert!(v.base.x().abs() < 1e-12);
            assert!((v.base.y() - t.exp()).abs() < 1e-9 * t.exp());
            assert!(v.dir().abs() < 1e-12);
        }
    }

    #[test]
    fn flow_covers_distance_t() {
        let u = UnitTangent::new(pt(0.7, 0.4), -2.1);
        for t in [0.1, 1.0, 5.0] {
            let v = flow(&u, t);
            assert!((dist(&u.base, &v.base) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn flow_is_additive() {
        let u = UnitTangent::new(pt(-0.3, 1.9), 0.77);
        let one = flow(&u, 1.3);
        let two = flow(&flow(&u, 0.8), 0.5);
        assert!(one.base.chart_dist(&two.base) < 1e-10);
        assert!((one.dir() - two.dir()).abs() < 1e-10);
    }

    #[test]
    fn flow_agrees_with_segment_parameterization() {
        let (p, q) = (pt(-0.6, 1.2), pt(2.0, 0.8));
        let seg = geodesic_between(&p, &q).unwrap();
        let u = seg.tangent_at(0.0);
        let v = flow(&u, seg.length);
        assert!(v.base.chart_dist(&q) < 1e-9);
    }

    #[test]
    fn through_tangent_recovers_chord_geodesic() {
        let seg = geodesic_between(&pt(0.3, 0.9), &pt(-1.1, 2.0)).unwrap();
        let (g, _) = Geodesic::through_tangent(&seg.tangent_at(0.0));
        match (g, seg.geo) {
            (Geodesic::Arc { center: c1, radius: r1 }, Geodesic::Arc { center: c2, radius: r2 }) => {
                assert!((c1 - c2).abs() < 1e-9);
                assert!((r1 - r2).abs() < 1e-9);
            }
            (a, b) => panic!("kind mismatch: {a:?} vs {b:?}"),
        }
    }

    #[test]
    fn rightward_tangent_at_i_spans_unit_circle() {
        let u = UnitTangent::new(pt(0.0, 1.0), -std::f64::consts::FRAC_PI_2);
        let (g, forward) = Geodesic::through_tangent(&u);
        match g {
            Geodesic::Arc { center, radius } => {
                assert!(center.abs() < 1e-12);
                assert!((radius - 1.0).abs() < 1e-12);
            }
            _ => panic!("expected an arc"),
        }
        assert!(!forward);
    }

    #[test]
    fn singular_flag_requires_rational_ends() {
        let g = CompleteGeodesic::from_boundary(
            BoundaryPoint::from_rational(0, 1).unwrap(),
            BoundaryPoint::infinity(),
        )
        .unwrap();
        assert!(g.is_singular());
        assert_eq!(g.geo, Geodesic::Vertical { x: 0.0 });
        let h = CompleteGeodesic::from_boundary(
            BoundaryPoint::from_real(0.5),
            BoundaryPoint::from_rational(2, 1).unwrap(),
        )
        .unwrap();
        assert!(!h.is_singular());
        match h.geo {
            Geodesic::Arc { center, radius } => {
                assert!((center - 1.25).abs() < 1e-15);
                assert!((radius - 0.75).abs() < 1e-15);
            }
            _ => panic!("expected an arc"),
        }
    }

    #[test]
    fn complete_geodesic_orientation() {
        let g = CompleteGeodesic::from_boundary(
            BoundaryPoint::from_real(2.0),
            BoundaryPoint::from_real(-1.0),
        )
        .unwrap();
        assert!(g.forward());
        match g.end.value {
            ExtendedReal::Finite(v) => assert_eq!(v, -1.0),
            _ => panic!(),
        }
    }

    #[test]
    fn sigma_roundtrip_on_arc() {
        let g = Geodesic::Arc { center: 0.4, radius: 2.5 };
        for sigma in [-3.0, -0.5, 0.0, 1.2, 4.0] {
            let p = g.point_at_sigma(sigma);
            assert!((g.sigma_of(&p) - sigma).abs() < 1e-10);
        }
    }
}
