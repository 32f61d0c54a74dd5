use super::moebius::MappingClassElement;
use super::point::HalfPlanePoint;
use crate::error::{Error, Result};
use crate::tol::{REDUCE_CAP, TOL_GEOM};

/// Reduces a point into the standard fundamental domain
/// `|Re z| ≤ 1/2, |z| ≥ 1` of the integer Möbius group, returning the
/// reduced point together with the exact integer element that performs
/// the reduction (`p0 = g·p`).
///
/// Boundary ties are broken toward the Re ≤ 0 side: points with
/// `Re = +1/2` are translated to `Re = −1/2`, and points on the unit
/// circle with `Re > 0` are inverted to `Re < 0`. This makes the reduced
/// representative unique, so reduction can serve as a census key.
pub fn reduce_to_fundamental_domain(
    p: &HalfPlanePoint,
) -> Result<(HalfPlanePoint, MappingClassElement)> {
    let mut g = MappingClassElement::identity();
    let mut z = *p;
    for _ in 0..REDUCE_CAP {
        let n = z.x().round();
        if n != 0.0 {
            if n.abs() > (i64::MAX / 4) as f64 {
                return Err(Error::Overflow);
            }
            let t = MappingClassElement::translation(-(n as i64));
            g = t.compose(&g)?;
            z = t.apply(&z);
        }
        let norm2 = z.x() * z.x() + z.y() * z.y();
        if norm2 < 1.0 - TOL_GEOM {
            let s = MappingClassElement::inversion();
            g = s.compose(&g)?;
            z = s.apply(&z);
            continue;
        }
        // Interior (or boundary) reached: resolve ties toward Re ≤ 0.
        if (z.x() - 0.5).abs() <= TOL_GEOM {
            let t = MappingClassElement::translation(-1);
            g = t.compose(&g)?;
            z = t.apply(&z);
        }
        if norm2 <= 1.0 + TOL_GEOM && z.x() > TOL_GEOM {
            let s = MappingClassElement::inversion();
            g = s.compose(&g)?;
        }
        // Recompute from the original point through the exact integer map
        // so the output is a single well-conditioned Möbius evaluation.
        return Ok((g.apply(p), g));
    }
    Err(Error::NonTermination { cap: REDUCE_CAP })
}

/// True when the point lies in the closed standard fundamental domain.
pub fn in_fundamental_domain(p: &HalfPlanePoint) -> bool {
    p.x().abs() <= 0.5 + TOL_GEOM && p.x() * p.x() + p.y() * p.y() >= 1.0 - TOL_GEOM
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn translate_far_point_back() {
        let (p0, g) = reduce_to_fundamental_domain(&pt(7.0, 1.0)).unwrap();
        assert!(p0.chart_dist(&pt(0.0, 1.0)) < 1e-12);
        assert_eq!(g, MappingClassElement::translation(-7));
    }

    #[test]
    fn invert_small_point_up() {
        let (p0, g) = reduce_to_fundamental_domain(&pt(0.0, 0.1)).unwrap();
        assert!(p0.chart_dist(&pt(0.0, 10.0)) < 1e-9);
        assert_eq!(g, MappingClassElement::inversion());
    }

    #[test]
    fn fixed_point_stays() {
        let (p0, g) = reduce_to_fundamental_domain(&pt(0.0, 1.0)).unwrap();
        assert!(p0.chart_dist(&pt(0.0, 1.0)) < 1e-15);
        assert!(g.is_identity());
    }

    #[test]
    fn reduced_points_land_in_domain() {
        for (x, y) in [(3.7, 0.1), (-2.9, 0.02), (0.49, 0.01), (15.3, 2.0), (0.33, 0.001)] {
            let p = pt(x, y);
            let (p0, g) = reduce_to_fundamental_domain(&p).unwrap();
            assert!(in_fundamental_domain(&p0), "({x}, {y}) reduced to ({}, {})", p0.x(), p0.y());
            assert!(g.apply(&p).chart_dist(&p0) < 1e-12);
        }
    }

    #[test]
    fn boundary_ties_resolve_to_nonpositive_side() {
        let (p0, _) = reduce_to_fundamental_domain(&pt(0.5, 2.0)).unwrap();
        assert!((p0.x() + 0.5).abs() < 1e-12);
        // A point on the unit circle with positive real part flips over.
        let on_circle = pt(0.3, (1.0_f64 - 0.09).sqrt());
        let (q0, _) = reduce_to_fundamental_domain(&on_circle).unwrap();
        assert!(q0.x() <= TOL_GEOM);
        assert!((q0.x() * q0.x() + q0.y() * q0.y() - 1.0).abs() < 1e-9);
    }
}
