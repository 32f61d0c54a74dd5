use serde::{Deserialize, Serialize};

use super::point::{BoundaryPoint, ExtendedReal, HalfPlanePoint, Rational, UnitTangent};
use super::wrap_angle;
use crate::error::{Error, Result};

/// An integer 2×2 matrix with determinant 1, acting on the half-plane by
/// Möbius maps. A matrix is identified with its negation; construction
/// canonicalizes the sign so that the first nonzero entry of
/// `(a, b, c, d)` is positive, making equality and hashing projective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawMat")]
pub struct MappingClassElement {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

#[derive(Deserialize)]
struct RawMat {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl TryFrom<RawMat> for MappingClassElement {
    type Error = Error;
    fn try_from(m: RawMat) -> Result<Self> {
        MappingClassElement::new(m.a, m.b, m.c, m.d)
    }
}

impl MappingClassElement {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = (a as i128) * (d as i128) - (b as i128) * (c as i128);
        if det != 1 {
            let det = i64::try_from(det).unwrap_or(i64::MAX);
            return Err(Error::NotUnimodular { a, b, c, d, det });
        }
        Ok(Self { a, b, c, d }.canonical())
    }

    fn canonical(self) -> Self {
        let Self { a, b, c, d } = self;
        for v in [a, b, c, d] {
            if v != 0 {
                return if v < 0 { Self { a: -a, b: -b, c: -c, d: -d } } else { self };
            }
        }
        self
    }

    pub fn identity() -> Self {
        Self { a: 1, b: 0, c: 0, d: 1 }
    }

    /// The parabolic `z ↦ z + n` fixing ∞.
    pub fn translation(n: i64) -> Self {
        Self { a: 1, b: n, c: 0, d: 1 }.canonical()
    }

    /// The involution `z ↦ −1/z`.
    pub fn inversion() -> Self {
        Self { a: 0, b: -1, c: 1, d: 0 }.canonical()
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.a, self.b, self.c, self.d)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn trace(&self) -> i64 {
        self.a + self.d
    }

    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        let m = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow)
        };
        Ok(Self {
            a: m(self.a, rhs.a, self.b, rhs.c)?,
            b: m(self.a, rhs.b, self.b, rhs.d)?,
            c: m(self.c, rhs.a, self.d, rhs.c)?,
            d: m(self.c, rhs.b, self.d, rhs.d)?,
        }
        .canonical())
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.canonical()
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inverse() } else { *self };
        let mut k = n.unsigned_abs();
        let mut acc = Self::identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base)?;
            }
        }
        Ok(acc)
    }

    /// Möbius action on an interior point.
    pub fn apply(&self, p: &HalfPlanePoint) -> HalfPlanePoint {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let (x, y) = (p.x(), p.y());
        let dre = c * x + d;
        let dim = c * y;
        let d2 = dre * dre + dim * dim;
        let nx = ((a * x + b) * dre + a * c * y * y) / d2;
        let ny = y / d2;
        HalfPlanePoint::new(nx, ny).expect("Möbius maps preserve the upper half-plane")
    }

    /// Action on a unit tangent: the base moves by the Möbius map and the
    /// direction rotates by arg g′(z) = −2·arg(cz + d).
    pub fn apply_tangent(&self, t: &UnitTangent) -> UnitTangent {
        let (c, d) = (self.c as f64, self.d as f64);
        let (x, y) = (t.base.x(), t.base.y());
        let rot = -2.0 * f64::atan2(c * y, c * x + d);
        UnitTangent::new(self.apply(&t.base), wrap_angle(t.dir() + rot))
    }

    /// Action on a boundary point; exact on rationals.
    pub fn apply_boundary(&self, p: &BoundaryPoint) -> Result<BoundaryPoint> {
        if let Some(r) = p.rational {
            let np = (self.a as i128) * (r.p() as i128) + (self.b as i128) * (r.q() as i128);
            let nq = (self.c as i128) * (r.p() as i128) + (self.d as i128) * (r.q() as i128);
            let np = i64::try_from(np).map_err(|_| Error::Overflow)?;
            let nq = i64::try_from(nq).map_err(|_| Error::Overflow)?;
            return BoundaryPoint::from_rational(np, nq);
        }
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        Ok(match p.value {
            ExtendedReal::Infinity => {
                if self.c == 0 {
                    BoundaryPoint::infinity()
                } else {
                    BoundaryPoint::from_real(a / c)
                }
            }
            ExtendedReal::Finite(v) => {
                let den = c * v + d;
                if den == 0.0 {
                    BoundaryPoint { value: ExtendedReal::Infinity, rational: None }
                } else {
                    BoundaryPoint::from_real((a * v + b) / den)
                }
            }
        })
    }

    /// An integer matrix sending the exact cusp `p/q` to ∞ (the bottom row
    /// is `(q, −p)`; the top row comes from the extended gcd so the
    /// determinant is 1). The cusp ∞ itself maps by the identity.
    pub fn cusp_to_infinity(r: &Rational) -> Self {
        if r.is_infinity() {
            return Self::identity();
        }
        let (_, s, t) = egcd(r.p(), r.q());
        Self { a: -s, b: -t, c: r.q(), d: -r.p() }.canonical()
    }

    pub fn to_real(&self) -> RealMoebius {
        RealMoebius { a: self.a as f64, b: self.b as f64, c: self.c as f64, d: self.d as f64 }
    }
}

/// Extended gcd: returns `(g, s, t)` with `s·a + t·b = g = gcd(a, b)`.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = egcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

/// A real Möbius map with positive determinant, used internally for closed
/// forms (geodesic flow, projections) where non-integer entries arise.
#[derive(Debug, Clone, Copy)]
pub struct RealMoebius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl RealMoebius {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::ProjectionFailure {
                reason: format!("real Möbius determinant {det} must be positive"),
            });
        }
        let s = det.sqrt();
        Ok(Self { a: a / s, b: b / s, c: c / s, d: d / s })
    }

    /// The upper-triangular map taking `i` to the given point.
    pub fn translation_to(p: &HalfPlanePoint) -> Self {
        let sy = p.y().sqrt();
        Self { a: sy, b: p.x() / sy, c: 0.0, d: 1.0 / sy }
    }

    /// The rotation fixing `i` that turns tangent directions by `theta`.
    pub fn rotation_at_i(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        Self { a: c, b: s, c: -s, d: c }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, p: &HalfPlanePoint) -> HalfPlanePoint {
        let (x, y) = (p.x(), p.y());
        let dre = self.c * x + self.d;
        let dim = self.c * y;
        let d2 = dre * dre + dim * dim;
        let det = self.a * self.d - self.b * self.c;
        let nx = ((self.a * x + self.b) * dre + self.a * self.c * y * y) / d2;
        let ny = det * y / d2;
        HalfPlanePoint::new(nx, ny).expect("positive-determinant Möbius maps preserve y > 0")
    }

    pub fn apply_tangent(&self, t: &UnitTangent) -> UnitTangent {
        let (x, y) = (t.base.x(), t.base.y());
        let rot = -2.0 * f64::atan2(self.c * y, self.c * x + self.d);
        UnitTangent::new(self.apply(&t.base), wrap_angle(t.dir() + rot))
    }

    pub fn apply_extended(&self, v: ExtendedReal) -> ExtendedReal {
        match v {
            ExtendedReal::Infinity => {
                if self.c == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Finite(self.a / self.c)
                }
            }
            ExtendedReal::Finite(v) => {
                let den = self.c * v + self.d;
                if den == 0.0 {
                    ExtendedReal::Infinity
                } else {
                    ExtendedReal::Finite((self.a * v + self.b) / den)
                }
            }
        }
    }
}
