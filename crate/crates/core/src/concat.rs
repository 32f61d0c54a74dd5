//! Piecewise-geodesic concatenations on the half-plane backend.
//!
//! A concatenation is an ordered chain of unit-speed geodesic segments,
//! each starting where the previous one ends. At every interior junction
//! the path turns by the *exterior angle*: the metric angle between the
//! incoming direction of travel and the outgoing one (zero iff the path
//! continues straight). The total exterior angle is the standard measure
//! of how far the concatenation is from a single geodesic, and every
//! quasi-geodesic argument in the crate budgets against it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::geodesic::{angle_between, GeodesicSegment};
use crate::hyp::point::{HalfPlanePoint, UnitTangent};
use crate::tol;

/// A chained sequence of geodesic segments, with consecutive endpoints
/// matching within [`tol::TOL_GEOM`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Concatenation {
    segments: Vec<GeodesicSegment>,
}

impl Concatenation {
    pub fn new(segments: Vec<GeodesicSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidPlan { reason: "empty concatenation".into() });
        }
        for (i, pair) in segments.windows(2).enumerate() {
            let gap = crate::hyp::dist(&pair[0].end, &pair[1].start);
            if gap > tol::TOL_GEOM {
                return Err(Error::EndpointMismatch { index: i, gap });
            }
        }
        Ok(Self { segments })
    }

    /// Builds the chain of segments visiting `points` in order.
    pub fn from_points(points: &[HalfPlanePoint]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidPlan { reason: "need at least two points".into() });
        }
        let segments = points
            .windows(2)
            .map(|w| GeodesicSegment::new(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(segments)
    }

    pub fn segments(&self) -> &[GeodesicSegment] {
        &self.segments
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(|s| s.length).sum()
    }

    pub fn start(&self) -> HalfPlanePoint {
        self.segments[0].start
    }

    pub fn end(&self) -> HalfPlanePoint {
        self.segments.last().expect("nonempty").end
    }

    /// The visited vertices, including both ends.
    pub fn vertices(&self) -> Vec<HalfPlanePoint> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push(self.segments[0].start);
        out.extend(self.segments.iter().map(|s| s.end));
        out
    }

    /// Locates arclength `s` (clamped): segment index and offset within it.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        let mut remaining = s.max(0.0);
        for (i, seg) in self.segments.iter().enumerate() {
            if remaining <= seg.length || i == self.segments.len() - 1 {
                return (i, remaining.min(seg.length));
            }
            remaining -= seg.length;
        }
        unreachable!("nonempty segment list")
    }

    pub fn point_at(&self, s: f64) -> HalfPlanePoint {
        let (i, off) = self.locate(s);
        self.segments[i].point_at(off)
    }

    /// Direction of travel at arclength `s`; at a junction, the outgoing
    /// side wins.
    pub fn tangent_at(&self, s: f64) -> UnitTangent {
        let (i, off) = self.locate(s);
        if off >= self.segments[i].length && i + 1 < self.segments.len() {
            return self.segments[i + 1].tangent_at(0.0);
        }
        self.segments[i].tangent_at(off)
    }

    /// Turning angle at each interior junction, in [0, π].
    pub fn junction_angles(&self) -> Result<Vec<f64>> {
        self.segments
            .windows(2)
            .map(|pair| {
                let incoming = pair[0].tangent_at(pair[0].length);
                let outgoing = pair[1].tangent_at(0.0);
                angle_between(&incoming, &outgoing)
            })
            .collect()
    }

    /// The concatenation traversed backwards.
    pub fn reversed(&self) -> Self {
        Self { segments: self.segments.iter().rev().map(|s| s.reversed()).collect() }
    }
}

/// Sum of the turning angles over all interior junctions.
pub fn exterior_angle_total(c: &Concatenation) -> Result<f64> {
    Ok(c.junction_angles()?.into_iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> HalfPlanePoint {
        HalfPlanePoint::new(x, y).unwrap()
    }

    #[test]
    fn single_segment_has_no_turning() {
        let c = Concatenation::from_points(&[pt(0.0, 1.0), pt(0.0, 3.0)]).unwrap();
        assert_eq!(exterior_angle_total(&c).unwrap(), 0.0);
        assert!((c.total_length() - 3.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn straight_continuation_turns_by_zero() {
        let c =
            Concatenation::from_points(&[pt(0.0, 1.0), pt(0.0, 2.0), pt(0.0, 5.0)]).unwrap();
        let total = exterior_angle_total(&c).unwrap();
        assert!(total.abs() < 1e-12, "collinear pieces must not turn, got {total}");
    }

    #[test]
    fn vertical_then_chord_turns_by_known_angle() {
        // Tangent of the semicircle through (0, 2) and (2, 2) at its left
        // endpoint makes angle arccos(1/sqrt 5) with the upward vertical.
        let c =
            Concatenation::from_points(&[pt(0.0, 1.0), pt(0.0, 2.0), pt(2.0, 2.0)]).unwrap();
        let angles = c.junction_angles().unwrap();
        assert_eq!(angles.len(), 1);
        let expect = (1.0 / 5.0_f64.sqrt()).acos();
        assert!((angles[0] - expect).abs() < 1e-12, "got {}", angles[0]);
    }

    #[test]
    fn reversal_preserves_angles_and_length() {
        let c = Concatenation::from_points(&[
            pt(0.0, 1.0),
            pt(0.5, 2.0),
            pt(2.0, 1.5),
            pt(3.0, 0.8),
        ])
        .unwrap();
        let r = c.reversed();
        assert!((c.total_length() - r.total_length()).abs() < 1e-12);
        let mut fwd = c.junction_angles().unwrap();
        let bwd = r.junction_angles().unwrap();
        fwd.reverse();
        for (a, b) in fwd.iter().zip(&bwd) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn mismatched_segments_are_rejected() {
        let s1 = GeodesicSegment::new(pt(0.0, 1.0), pt(0.0, 2.0)).unwrap();
        let s2 = GeodesicSegment::new(pt(1.0, 2.0), pt(2.0, 2.0)).unwrap();
        match Concatenation::new(vec![s1, s2]) {
            Err(Error::EndpointMismatch { index: 0, gap }) => assert!(gap > 0.1),
            other => panic!("expected endpoint mismatch, got {other:?}"),
        }
    }

    #[test]
    fn point_and_tangent_walk_the_chain() {
        let c =
            Concatenation::from_points(&[pt(0.0, 1.0), pt(0.0, 2.0), pt(2.0, 2.0)]).unwrap();
        let l1 = 2.0_f64.ln();
        let p = c.point_at(l1 / 2.0);
        assert!((p.x()).abs() < 1e-12);
        assert!((p.y() - 2.0_f64.sqrt()).abs() < 1e-12);
        let t = c.tangent_at(l1 / 2.0);
        assert!(t.dir().abs() < 1e-12);
        let total = c.total_length();
        let end = c.point_at(total + 5.0);
        assert!(crate::hyp::dist(&end, &c.end()) < 1e-12);
    }

    #[test]
    fn locate_is_monotone_in_arclength() {
        let c = Concatenation::from_points(&[
            pt(0.0, 1.0),
            pt(1.0, 1.0),
            pt(2.0, 1.5),
            pt(2.5, 3.0),
        ])
        .unwrap();
        let total = c.total_length();
        let mut prev = (0usize, -1.0);
        for k in 0..=100 {
            let s = total * k as f64 / 100.0;
            let (i, off) = c.locate(s);
            assert!(i > prev.0 || (i == prev.0 && off >= prev.1));
            prev = (i, off);
        }
    }
}
