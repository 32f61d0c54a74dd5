use serde::{Deserialize, Serialize};

use super::wrap_angle;
use crate::error::{Error, Result};

/// A point `x + iy` of the open upper half-plane (`y > 0`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint")]
pub struct HalfPlanePoint {
    x: f64,
    y: f64,
}

#[derive(Deserialize)]
struct RawPoint {
    x: f64,
    y: f64,
}

impl TryFrom<RawPoint> for HalfPlanePoint {
    type Error = Error;
    fn try_from(raw: RawPoint) -> Result<Self> {
        HalfPlanePoint::new(raw.x, raw.y)
    }
}

impl HalfPlanePoint {
    /// Rejects `y <= 0` and non-finite coordinates.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && y > 0.0) {
            return Err(Error::InvalidPoint { x, y });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Euclidean chart distance (used only for well-conditioned local tests).
    pub fn chart_dist(&self, other: &Self) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A unit tangent vector: a base point plus a direction angle measured
/// from the vertical, counterclockwise, normalized to (−π, π]. The
/// direction-only storage makes the hyperbolic norm 1 by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitTangent {
    pub base: HalfPlanePoint,
    dir: f64,
}

impl UnitTangent {
    pub fn new(base: HalfPlanePoint, dir: f64) -> Self {
        Self { base, dir: wrap_angle(dir) }
    }

    /// Builds the tangent whose chart direction is `(vx, vy)` (any nonzero
    /// scale; the hyperbolic metric is conformal so only the direction
    /// matters).
    pub fn from_vector(base: HalfPlanePoint, vx: f64, vy: f64) -> Result<Self> {
        if vx == 0.0 && vy == 0.0 {
            return Err(Error::ProjectionFailure { reason: "zero tangent vector".into() });
        }
        Ok(Self { base, dir: wrap_angle(f64::atan2(-vx, vy)) })
    }

    pub fn dir(&self) -> f64 {
        self.dir
    }

    /// Unit chart vector `(−sin dir, cos dir)` (Euclidean norm 1; the
    /// hyperbolic-unit representative is this divided by nothing — the
    /// angle alone fixes the hyperbolic unit vector at the base).
    pub fn vector(&self) -> (f64, f64) {
        (-self.dir.sin(), self.dir.cos())
    }

    /// The opposite tangent at the same base.
    pub fn reversed(&self) -> Self {
        Self { base: self.base, dir: wrap_angle(self.dir + std::f64::consts::PI) }
    }
}

/// An exact integer ratio `p/q` in lowest terms with `q >= 0`;
/// `(1, 0)` encodes the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Rational {
    p: i64,
    q: i64,
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::ProjectionFailure { reason: "0/0 is not a boundary point".into() });
        }
        let g = gcd_i64(p.unsigned_abs(), q.unsigned_abs()) as i64;
        let (mut p, mut q) = (p / g, q / g);
        if q < 0 || (q == 0 && p < 0) {
            p = -p;
            q = -q;
        }
        Ok(Self { p, q })
    }

    pub const fn infinity() -> Self {
        Self { p: 1, q: 0 }
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.q == 0 {
            f64::INFINITY
        } else {
            self.p as f64 / self.q as f64
        }
    }
}

fn gcd_i64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// A finite real number or the symbol ∞.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinity(&self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }
}

/// A point of the boundary circle ℝ ∪ {∞}. The `rational` field is
/// populated only from exact integer data supplied by the caller; it is
/// never recovered from the float value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub value: ExtendedReal,
    pub rational: Option<Rational>,
}

impl BoundaryPoint {
    pub fn from_real(v: f64) -> Self {
        Self { value: ExtendedReal::Finite(v), rational: None }
    }

    pub fn from_rational(p: i64, q: i64) -> Result<Self> {
        let r = Rational::new(p, q)?;
        let value =
            if r.is_infinity() { ExtendedReal::Infinity } else { ExtendedReal::Finite(r.to_f64()) };
        Ok(Self { value, rational: Some(r) })
    }

    pub fn infinity() -> Self {
        Self { value: ExtendedReal::Infinity, rational: Some(Rational::infinity()) }
    }

    pub fn is_rational(&self) -> bool {
        self.rational.is_some()
    }

    pub fn to_f64(&self) -> f64 {
        match self.value {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::Infinity => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HalfPlanePoint::new(0.0, -1.0).is_err());
        assert!(HalfPlanePoint::new(0.0, 0.0).is_err());
        assert!(HalfPlanePoint::new(f64::NAN, 1.0).is_err());
        assert!(HalfPlanePoint::new(0.0, 1.0).is_ok());
    }

    #[test]
    fn tangent_direction_convention() {
        let base = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let up = UnitTangent::from_vector(base, 0.0, 1.0).unwrap();
        assert_eq!(up.dir(), 0.0);
        let left = UnitTangent::from_vector(base, -1.0, 0.0).unwrap();
        assert!((left.dir() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let right = UnitTangent::from_vector(base, 1.0, 0.0).unwrap();
        assert!((right.dir() + std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let down = UnitTangent::from_vector(base, 0.0, -1.0).unwrap();
        assert!((down.dir() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn tangent_vector_roundtrip() {
        let base = HalfPlanePoint::new(0.3, 2.0).unwrap();
        for dir in [-3.0, -1.0, 0.0, 0.5, 2.0, 3.1] {
            let t = UnitTangent::new(base, dir);
            let (vx, vy) = t.vector();
            let back = UnitTangent::from_vector(base, vx, vy).unwrap();
            assert!((back.dir() - t.dir()).abs() < 1e-12);
        }
    }

    #[test]
    fn rational_reduction_and_infinity() {
        let r = Rational::new(6, -4).unwrap();
        assert_eq!((r.p(), r.q()), (-3, 2));
        let inf = Rational::new(-5, 0).unwrap();
        assert!(inf.is_infinity());
        assert_eq!((inf.p(), inf.q()), (1, 0));
        assert!(Rational::new(0, 0).is_err());
        assert_eq!(Rational::new(0, 7).unwrap(), Rational::new(0, 1).unwrap());
    }

    #[test]
    fn boundary_point_rational_flag() {
        let b = BoundaryPoint::from_rational(3, 6).unwrap();
        assert!(b.is_rational());
        assert_eq!(b.to_f64(), 0.5);
        let f = BoundaryPoint::from_real(0.5);
        assert!(!f.is_rational());
        assert!(BoundaryPoint::infinity().value.is_infinity());
    }
}
