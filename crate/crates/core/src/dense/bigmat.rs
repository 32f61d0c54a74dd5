//! Exact arithmetic for cross-frame bookkeeping: arbitrary-precision
//! rationals, determinant-one integer Möbius maps, and horoball images.
//!
//! Frame-to-frame transition composites of a long chain have entries far
//! beyond i64 (hundreds of bits), while every measured quantity lives in
//! some single frame where f64 geometry is well conditioned. This module
//! carries the exact data between frames: projective action on ideal
//! points, exact rational comparisons for disjointness certificates, and
//! conversion to f64 only at the end.

use num_bigint::BigInt;

use crate::hyp::MappingClassElement;

fn big_gcd(mut a: BigInt, mut b: BigInt) -> BigInt {
    if a.sign() == num_bigint::Sign::Minus {
        a = -a;
    }
    if b.sign() == num_bigint::Sign::Minus {
        b = -b;
    }
    while b != BigInt::from(0) {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn is_zero(x: &BigInt) -> bool {
    x.sign() == num_bigint::Sign::NoSign
}

/// `n / d` as f64, correct across magnitudes f64 cannot hold directly.
pub fn ratio_to_f64(n: &BigInt, d: &BigInt) -> f64 {
    if is_zero(d) {
        return match n.sign() {
            num_bigint::Sign::Minus => f64::NEG_INFINITY,
            num_bigint::Sign::NoSign => f64::NAN,
            num_bigint::Sign::Plus => f64::INFINITY,
        };
    }
    if is_zero(n) {
        return 0.0;
    }
    let shift_n = n.bits().saturating_sub(53) as usize;
    let shift_d = d.bits().saturating_sub(53) as usize;
    let n_hat = i64::try_from(n >> shift_n).expect("shifted to 53 bits") as f64;
    let d_hat = i64::try_from(d >> shift_d).expect("shifted to 53 bits") as f64;
    (n_hat / d_hat) * 2f64.powi(shift_n as i32 - shift_d as i32)
}

/// `ln |n / d|` as f64, stable for magnitudes far outside f64 range.
pub fn ratio_ln(n: &BigInt, d: &BigInt) -> f64 {
    assert!(!is_zero(n) && !is_zero(d), "ln of zero or infinite ratio");
    let shift_n = n.bits().saturating_sub(53) as usize;
    let shift_d = d.bits().saturating_sub(53) as usize;
    let n_hat = i64::try_from(n >> shift_n).expect("shifted to 53 bits").unsigned_abs() as f64;
    let d_hat = i64::try_from(d >> shift_d).expect("shifted to 53 bits").unsigned_abs() as f64;
    n_hat.ln() - d_hat.ln() + (shift_n as f64 - shift_d as f64) * std::f64::consts::LN_2
}

/// Exact rational with positive denominator, reduced to lowest terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigRat {
    n: BigInt,
    d: BigInt,
}

impl BigRat {
    pub fn new(n: BigInt, d: BigInt) -> Self {
        assert!(!is_zero(&d), "zero denominator");
        let g = big_gcd(n.clone(), d.clone());
        let (mut n, mut d) = (n / &g, d / &g);
        if d.sign() == num_bigint::Sign::Minus {
            n = -n;
            d = -d;
        }
        Self { n, d }
    }

    pub fn from_i64(n: i64, d: i64) -> Self {
        Self::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn from_int(n: i64) -> Self {
        Self { n: BigInt::from(n), d: BigInt::from(1) }
    }

    /// Exact value of a finite f64 (every finite f64 is rational).
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "not a finite value");
        let (mant, exp) = {
            let bits = x.to_bits();
            let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
            let biased = ((bits >> 52) & 0x7ff) as i64;
            let frac = (bits & ((1u64 << 52) - 1)) as i64;
            if biased == 0 {
                (sign * frac, -1074)
            } else {
                (sign * (frac + (1 << 52)), biased - 1075)
            }
        };
        if exp >= 0 {
            Self::new(BigInt::from(mant) << (exp as usize), BigInt::from(1))
        } else {
            Self::new(BigInt::from(mant), BigInt::from(1) << ((-exp) as usize))
        }
    }

    pub fn numer(&self) -> &BigInt {
        &self.n
    }

    pub fn denom(&self) -> &BigInt {
        &self.d
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self::new(&self.n * &rhs.d + &rhs.n * &self.d, &self.d * &rhs.d)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self::new(&self.n * &rhs.d - &rhs.n * &self.d, &self.d * &rhs.d)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::new(&self.n * &rhs.n, &self.d * &rhs.d)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.d.clone(), self.n.clone())
    }

    pub fn abs(&self) -> Self {
        if self.n.sign() == num_bigint::Sign::Minus {
            Self { n: -self.n.clone(), d: self.d.clone() }
        } else {
            self.clone()
        }
    }

    pub fn square(&self) -> Self {
        Self { n: &self.n * &self.n, d: &self.d * &self.d }
    }

    pub fn is_negative(&self) -> bool {
        self.n.sign() == num_bigint::Sign::Minus
    }

    pub fn is_zero(&self) -> bool {
        is_zero(&self.n)
    }

    /// Exact comparison (denominators are positive by construction).
    pub fn cmp_rat(&self, rhs: &Self) -> std::cmp::Ordering {
        (&self.n * &rhs.d).cmp(&(&rhs.n * &self.d))
    }

    pub fn lt(&self, rhs: &Self) -> bool {
        self.cmp_rat(rhs) == std::cmp::Ordering::Less
    }

    pub fn to_f64(&self) -> f64 {
        ratio_to_f64(&self.n, &self.d)
    }

    pub fn ln_f64(&self) -> f64 {
        ratio_ln(&self.n, &self.d)
    }
}

/// Determinant-one integer Möbius map with arbitrary-precision entries.
#[derive(Debug, Clone)]
pub struct BigMoebius {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl BigMoebius {
    pub fn identity() -> Self {
        Self { a: 1.into(), b: 0.into(), c: 0.into(), d: 1.into() }
    }

    pub fn from_element(m: &MappingClassElement) -> Self {
        let (a, b, c, d) = m.entries();
        Self { a: a.into(), b: b.into(), c: c.into(), d: d.into() }
    }

    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }

    /// Exact inverse (the adjugate; valid because the determinant is 1).
    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    /// Projective action on an ideal point `(p : q)`; `(1 : 0)` is ∞.
    pub fn apply_proj(&self, p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
        (&self.a * p + &self.b * q, &self.c * p + &self.d * q)
    }

    /// Exact image of an interior point with rational coordinates:
    /// with det = 1, `den = (cx+d)² + (cy)²`, the image is
    /// `x' = ((ax+b)(cx+d) + ac·y²) / den`, `y' = y / den`.
    pub fn apply_point(&self, x: &BigRat, y: &BigRat) -> (BigRat, BigRat) {
        let int = |v: &BigInt| BigRat { n: v.clone(), d: BigInt::from(1) };
        let cx_d = int(&self.c).mul(x).add(&int(&self.d));
        let ax_b = int(&self.a).mul(x).add(&int(&self.b));
        let cy = int(&self.c).mul(y);
        let den = cx_d.square().add(&cy.square());
        let nx = ax_b.mul(&cx_d).add(&int(&self.a).mul(&int(&self.c)).mul(&y.square()));
        (nx.mul(&den.recip()), y.mul(&den.recip()))
    }
}

/// A complete geodesic with exactly rational invariants: either a
/// vertical line, or the half-circle with feet `c ± √rsq`. The pair
/// `(c, rsq)` is rational even when the feet are quadratic irrationals,
/// and stays rational under integer Möbius maps: with `M = [[α,β],[γ,δ]]`
/// of determinant one and `E = γ²(c² − rsq) + 2γδc + δ²` (the product of
/// the two foot denominators, a symmetric function of the feet),
/// `c' = (αγ(c² − rsq) + (αδ + βγ)c + βδ)/E` and `rsq' = rsq/E²`.
#[derive(Debug, Clone)]
pub enum ExactGeo {
    Arc { c: BigRat, rsq: BigRat },
    Vertical { x: BigRat },
}

impl ExactGeo {
    /// The geodesic through two distinct interior points given exactly.
    pub fn through_points(x1: &BigRat, y1: &BigRat, x2: &BigRat, y2: &BigRat) -> Self {
        if x1 == x2 {
            return ExactGeo::Vertical { x: x1.clone() };
        }
        // Center from equal circle radii: (x1−c)² + y1² = (x2−c)² + y2².
        let two = BigRat::from_int(2);
        let s1 = x1.square().add(&y1.square());
        let s2 = x2.square().add(&y2.square());
        let c = s2.sub(&s1).mul(&two.mul(&x2.sub(x1)).recip());
        let rsq = x1.sub(&c).square().add(&y1.square());
        ExactGeo::Arc { c, rsq }
    }

    /// Exact image under a determinant-one integer Möbius map.
    pub fn map(&self, m: &BigMoebius) -> Self {
        let int = |v: &BigInt| BigRat { n: v.clone(), d: BigInt::from(1) };
        let (al, be, ga, de) = (int(&m.a), int(&m.b), int(&m.c), int(&m.d));
        match self {
            ExactGeo::Arc { c, rsq } => {
                let pow = c.square().sub(rsq); // product of the feet
                let e = ga
                    .square()
                    .mul(&pow)
                    .add(&BigRat::from_int(2).mul(&ga).mul(&de).mul(c))
                    .add(&de.square());
                if e.is_zero() {
                    // One foot is the rational −δ/γ and maps to ∞; the
                    // other is 2c + δ/γ and its image is the new line.
                    let f = BigRat::from_int(2).mul(c).add(&de.mul(&ga.recip()));
                    let den = ga.mul(&f).add(&de);
                    let x = al.mul(&f).add(&be).mul(&den.recip());
                    ExactGeo::Vertical { x }
                } else {
                    let nc = al
                        .mul(&ga)
                        .mul(&pow)
                        .add(&al.mul(&de).add(&be.mul(&ga)).mul(c))
                        .add(&be.mul(&de))
                        .mul(&e.recip());
                    let nrsq = rsq.mul(&e.square().recip());
                    ExactGeo::Arc { c: nc, rsq: nrsq }
                }
            }
            ExactGeo::Vertical { x } => {
                if ga.is_zero() {
                    let nx = al.mul(x).add(&be).mul(&de.recip());
                    return ExactGeo::Vertical { x: nx };
                }
                let den = ga.mul(x).add(&de);
                let finf = al.mul(&ga.recip());
                if den.is_zero() {
                    return ExactGeo::Vertical { x: finf };
                }
                let f1 = al.mul(x).add(&be).mul(&den.recip());
                let half = BigRat::from_i64(1, 2);
                let c = f1.add(&finf).mul(&half);
                let rsq = f1.sub(&finf).mul(&half).square();
                ExactGeo::Arc { c, rsq }
            }
        }
    }

    /// f64 rendering in the frame where the exact data lives.
    pub fn to_geodesic(&self) -> crate::hyp::Geodesic {
        match self {
            ExactGeo::Arc { c, rsq } => crate::hyp::Geodesic::Arc {
                center: c.to_f64(),
                radius: rsq.to_f64().sqrt(),
            },
            ExactGeo::Vertical { x } => crate::hyp::Geodesic::Vertical { x: x.to_f64() },
        }
    }

    /// Feet as f64 (low, high), or None for a vertical line.
    pub fn feet_f64(&self) -> Option<(f64, f64)> {
        match self {
            ExactGeo::Arc { c, rsq } => {
                let (c, r) = (c.to_f64(), rsq.to_f64().sqrt());
                Some((c - r, c + r))
            }
            ExactGeo::Vertical { .. } => None,
        }
    }
}

/// A horoball expressed in some frame: either the half-plane `y ≥ level`
/// (tangent at ∞) or the Euclidean disk of diameter `diam` tangent to the
/// real axis at the reduced rational `p/q`.
#[derive(Debug, Clone)]
pub enum Horoball {
    AtInfinity { level: BigRat },
    Tangent { p: BigInt, q: BigInt, diam: BigRat },
}

impl Horoball {
    /// The half-plane horoball `y ≥ level` (level a positive rational).
    pub fn at_infinity(level: BigRat) -> Self {
        assert!(!level.is_negative() && !level.is_zero(), "level must be positive");
        Horoball::AtInfinity { level }
    }

    /// Image under a determinant-one integer Möbius map; exact.
    pub fn map(&self, m: &BigMoebius) -> Self {
        match self {
            Horoball::AtInfinity { level } => {
                if is_zero(&m.c) {
                    // z ↦ (az + b)/d with ad = 1: heights scale by 1/d².
                    let scale = BigRat::new(BigInt::from(1), &m.d * &m.d);
                    Horoball::AtInfinity { level: level.mul(&scale) }
                } else {
                    let diam = level.recip().mul(&BigRat::new(BigInt::from(1), &m.c * &m.c));
                    Horoball::Tangent { p: m.a.clone(), q: m.c.clone(), diam }
                }
            }
            Horoball::Tangent { p, q, diam } => {
                let (np, nq) = m.apply_proj(p, q);
                if is_zero(&nq) {
                    // The tangent point maps to ∞. The ball's top point
                    // p/q + i·diam lies on the boundary horocycle, and
                    // c·z_top + d = (cp + dq)/q + i·c·diam = i·c·diam, so
                    // its image height — the new half-plane's floor — is
                    // diam / |c·z_top + d|² = 1/(c²·diam).
                    let level = BigRat::new(diam.denom().clone(), (&m.c * &m.c) * diam.numer());
                    Horoball::AtInfinity { level }
                } else {
                    // Diameter transforms by the derivative at the tangent
                    // point: diam' = diam · q² / (c p + d q)².
                    let scale = BigRat::new(q * q, &nq * &nq);
                    Horoball::Tangent { p: np, q: nq, diam: diam.mul(&scale) }
                }
            }
        }
    }

    /// Euclidean diameter as f64 (may underflow to 0 for deep images;
    /// callers treat 0 as "vanishingly far away").
    pub fn diam_f64(&self) -> Option<f64> {
        match self {
            Horoball::AtInfinity { .. } => None,
            Horoball::Tangent { diam, .. } => Some(diam.to_f64()),
        }
    }
}
