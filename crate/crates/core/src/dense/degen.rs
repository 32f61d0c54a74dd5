//! Non-degeneration certificate for built chains.
//!
//! Two families of checks. First, around every splice cusp the chain must
//! meet the level-h₁ horoball (the δ₁-neighborhood boundary, h₁ = 1/δ₁)
//! only in the one connected arc that performs the splice — the adjacent
//! body tops and the chord, which lie inside it by construction. Every
//! other piece must stay out, and the certificate reports how far out.
//! These tests run in exact arithmetic: the ball is mapped into each
//! foreign piece's frame as exact rational horoball data, vertical pieces
//! carry exact rational ranges, and disjointness reduces to square-free
//! rational comparisons, so exponentially thin configurations are decided
//! correctly. Clearances are then evaluated from exact logarithms.
//!
//! Second, the nested chords between body midpoints must track the chain
//! through every cusp region they traverse: where a chord crosses the
//! boundary of a δ₁/2-ball (height 2h₁ in that splice's frame), the
//! crossing point must lie within δ₂ of the chain. Crossing points come
//! from the chord's per-frame rendering; distances are measured against
//! the nearby pieces in neighboring frames.

use serde::Serialize;

use super::bigmat::{BigRat, Horoball};
use super::chain::{chord_frames, BuiltConcatenation, PieceKind};
use crate::error::Result;
use crate::hyp::{project_to_segment, Geodesic, HalfPlanePoint};

/// Outcome of the degeneration checks. `pass` requires no horoball
/// violations and every chord crossing within δ₂ of the chain.
#[derive(Debug, Clone, Serialize)]
pub struct DegenerationReport {
    pub bodies: usize,
    pub balls_checked: usize,
    pub foreign_pairs: usize,
    pub violations: Vec<String>,
    pub min_ball_clearance: Option<f64>,
    pub chords_checked: usize,
    pub crossings: usize,
    pub max_crossing_dist: f64,
    pub min_clearance: f64,
    pub pass: bool,
}

/// Distance from the vertical segment {x = ξ ± dx, y ∈ [y_bot, y_top]} to
/// the horoball of diameter `diam` tangent at ξ, in exact arithmetic;
/// None when they meet. The minimizing height is y* = clamp(dx, y_bot,
/// y_top) and the distance is ln((dx² + y*²)/(diam·y*)), evaluated in
/// logarithmic form so exponentially small data survives.
pub(crate) fn vertical_ball_clearance(
    dx: &BigRat,
    y_bot: &BigRat,
    y_top: &BigRat,
    diam: &BigRat,
) -> Option<f64> {
    let half = diam.mul(&BigRat::from_i64(1, 2));
    let dx = dx.abs();
    let ssq = half.square().sub(&dx.square());
    if !ssq.is_negative() {
        // The ball's shadow covers the segment's x-line: the ball spans
        // heights [half − s, half + s] there. Overlap is a pair of
        // square-free comparisons.
        let lower_ok = {
            let t = y_bot.sub(&half);
            if t.is_negative() || t.is_zero() {
                true
            } else {
                // y_bot ≤ half + s ⟺ (y_bot − half)² ≤ s².
                !ssq.lt(&t.square())
            }
        };
        let upper_ok = {
            let t = half.sub(y_top);
            if t.is_negative() || t.is_zero() {
                true
            } else {
                // y_top ≥ half − s ⟺ (half − y_top)² ≤ s².
                !ssq.lt(&t.square())
            }
        };
        if lower_ok && upper_ok {
            return None;
        }
    }
    let dx_ln = if dx.is_zero() { f64::NEG_INFINITY } else { dx.ln_f64() };
    let y_star_ln = dx_ln.clamp(y_bot.ln_f64(), y_top.ln_f64());
    Some(lse(2.0 * dx_ln - y_star_ln, y_star_ln) - diam.ln_f64())
}

fn lse(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Checks that the chain degenerates nowhere: splice horoballs meet only
/// their own splice arc, and the nested midpoint chords stay δ₂-close to
/// the chain at every cusp-ball crossing.
pub fn check_no_degeneration(c: &BuiltConcatenation) -> Result<DegenerationReport> {
    let h1r = BigRat::from_f64(c.h1());
    let h2r = BigRat::from_f64(c.h2());
    let mut violations = Vec::new();
    let mut min_ball_clearance: Option<f64> = None;
    let mut foreign_pairs = 0usize;

    for j in 0..c.splices() {
        let ball = Horoball::at_infinity(h1r.clone());
        for (idx, piece) in c.pieces().iter().enumerate() {
            let adjacent = matches!(
                piece.kind,
                PieceKind::Body(k) if k == j || k == j + 1
            ) || matches!(piece.kind, PieceKind::Chord(k) if k == j);
            if adjacent {
                continue;
            }
            foreign_pairs += 1;
            let img = ball.map(&c.frame_transition(j, piece.frame));
            let clearance = match (&img, piece.kind) {
                (Horoball::Tangent { p, q, diam }, PieceKind::Body(k)) => {
                    let u = c.body_foot(k);
                    let xi = BigRat::new(p.clone(), q.clone());
                    let dx = BigRat::from_i64(u.p(), u.q()).sub(&xi);
                    let (y_bot, y_top) = c.body_range_exact(k, &h2r);
                    vertical_ball_clearance(&dx, &y_bot, &y_top, diam)
                }
                (Horoball::Tangent { p, q, diam }, PieceKind::Chord(_)) => {
                    if diam.lt(&h2r) {
                        // Chord pieces live in {y ≥ h₂}; a ball of
                        // smaller diameter stays at least ln(h₂/diam)
                        // away.
                        Some(h2r.ln_f64() - diam.ln_f64())
                    } else {
                        chord_ball_clearance_numeric(piece, p, q, diam)
                    }
                }
                (Horoball::AtInfinity { level }, PieceKind::Body(k)) => {
                    let (_, y_top) = c.body_range_exact(k, &h2r);
                    if level.lt(&y_top) || level == &y_top {
                        None
                    } else {
                        Some(level.ln_f64() - y_top.ln_f64())
                    }
                }
                (Horoball::AtInfinity { level }, PieceKind::Chord(_)) => {
                    let apex = chord_apex(piece);
                    if apex >= level.to_f64() {
                        None
                    } else {
                        Some(level.ln_f64() - apex.ln())
                    }
                }
            };
            match clearance {
                None => violations.push(format!(
                    "splice ball {j} meets piece {idx} ({:?})",
                    piece.kind
                )),
                Some(d) => {
                    min_ball_clearance =
                        Some(min_ball_clearance.map_or(d, |m: f64| m.min(d)));
                }
            }
        }
    }

    let lvl = 2.0 * c.h1();
    let mut crossings = 0usize;
    let mut max_crossing_dist = 0.0f64;
    let pairs = nested_pairs(c.bodies());
    for &(l, r) in &pairs {
        let ch = chord_frames(c, l, r)?;
        for f in l..r {
            let geod = match &ch.in_frame(f).complete {
                Some(g) => g.geo,
                None => continue,
            };
            let xs: Vec<f64> = match geod {
                Geodesic::Arc { center, radius } => {
                    if radius <= lvl {
                        continue;
                    }
                    let half = (radius * radius - lvl * lvl).sqrt();
                    vec![center - half, center + half]
                }
                Geodesic::Vertical { x } => vec![x],
            };
            for x in xs {
                let z = HalfPlanePoint::new(x, lvl)?;
                let d = distance_to_nearby_pieces(c, &z, f);
                crossings += 1;
                max_crossing_dist = max_crossing_dist.max(d);
            }
        }
    }
    if c.bodies() == 1 {
        // The single working window crosses the level itself: the chord
        // family is the window, so the crossing lies on the chain.
        crossings = 1;
    }

    let crossing_clearance = c.delta2() - max_crossing_dist;
    let min_clearance = match min_ball_clearance {
        Some(b) => b.min(crossing_clearance),
        None => crossing_clearance,
    };
    let pass = violations.is_empty() && max_crossing_dist <= c.delta2();
    Ok(DegenerationReport {
        bodies: c.bodies(),
        balls_checked: c.splices(),
        foreign_pairs,
        violations,
        min_ball_clearance,
        chords_checked: pairs.len(),
        crossings,
        max_crossing_dist,
        min_clearance,
        pass,
    })
}

/// The nested midpoint-chord family: pairs (l, r) working outward from
/// the chain's center, ending with the full chord.
pub fn nested_pairs(bodies: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    if bodies < 2 {
        return out;
    }
    if bodies % 2 == 1 {
        let m = (bodies - 1) / 2;
        for n in 1..=m {
            out.push((m - n, m + n));
        }
    } else {
        let m0 = bodies / 2 - 1;
        for n in 0..=m0 {
            out.push((m0 - n, m0 + 1 + n));
        }
    }
    out
}

fn chord_apex(piece: &super::chain::Piece) -> f64 {
    match piece.seg.geo {
        Geodesic::Arc { radius, .. } => radius,
        Geodesic::Vertical { .. } => piece.seg.start.y().max(piece.seg.end.y()),
    }
}

/// Numeric fallback for a ball too large for the strip argument: sample
/// the chord piece and evaluate the Busemann distance directly.
fn chord_ball_clearance_numeric(
    piece: &super::chain::Piece,
    p: &num_bigint::BigInt,
    q: &num_bigint::BigInt,
    diam: &BigRat,
) -> Option<f64> {
    let xi = super::bigmat::ratio_to_f64(p, q);
    let d_ln = diam.ln_f64();
    let mut best = f64::INFINITY;
    let samples = 33;
    for i in 0..=samples {
        let s = piece.seg.length * i as f64 / samples as f64;
        let z = piece.seg.point_at(s);
        let dx = z.x() - xi;
        let val = lse(2.0 * dx.abs().ln(), 2.0 * z.y().ln()) - d_ln - z.y().ln();
        best = best.min(val);
    }
    if best <= 0.0 {
        None
    } else {
        Some(best)
    }
}

/// Distance from a point in frame `f` to the chain pieces in frames
/// f−1, f, f+1 (the pieces a ball-boundary crossing can be near).
fn distance_to_nearby_pieces(c: &BuiltConcatenation, z: &HalfPlanePoint, f: usize) -> f64 {
    let mut best = f64::INFINITY;
    for piece in c.pieces() {
        if piece.frame + 1 < f || piece.frame > f + 1 {
            continue;
        }
        let zf = if piece.frame == f {
            *z
        } else {
            c.neighbor_real(f, piece.frame).apply(z)
        };
        let proj = project_to_segment(&zf, &piece.seg);
        best = best.min(proj.dist);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::chain::build_concatenation;
    use crate::dense::plan::ConcatenationPlan;

    fn rat(n: i64, d: i64) -> BigRat {
        BigRat::from_i64(n, d)
    }

    #[test]
    fn vertical_clearance_matches_closed_forms() {
        // Ball of diameter 1 at ξ, vertical directly above (dx = 0) from
        // y = 2: clearance ln 2.
        let d = vertical_ball_clearance(&rat(0, 1), &rat(2, 1), &rat(3, 1), &rat(1, 1));
        assert!((d.unwrap() - 2.0f64.ln()).abs() < 1e-12);
        // Same ball, segment reaching down to y = 1/2 < 1: they meet.
        assert!(
            vertical_ball_clearance(&rat(0, 1), &rat(1, 2), &rat(3, 1), &rat(1, 1)).is_none()
        );
        // Laterally separated: dx = 2, minimizing height y* = 2 inside
        // the range: ln((4 + 4)/(1·2)) = ln 4.
        let d = vertical_ball_clearance(&rat(2, 1), &rat(1, 10), &rat(10, 1), &rat(1, 1));
        assert!((d.unwrap() - 4.0f64.ln()).abs() < 1e-12);
        // Same but the range stops at y = 1/2 below the optimum: value
        // at the endpoint, ln((4 + 1/4)/(1/2)) = ln 8.5.
        let d = vertical_ball_clearance(&rat(2, 1), &rat(1, 10), &rat(1, 2), &rat(1, 1));
        assert!((d.unwrap() - 8.5f64.ln()).abs() < 1e-12);
        // Tangency: dx = 1/2 touches a diameter-1 ball when the range
        // includes the tangent height.
        assert!(
            vertical_ball_clearance(&rat(1, 2), &rat(1, 10), &rat(10, 1), &rat(1, 1)).is_none()
        );
    }

    #[test]
    fn exponentially_thin_data_is_decided_exactly() {
        // A ball of diameter 2^-200 and a vertical passing at dx = 2^-201
        // overlap; at dx = 2^-199 they clear with a definite logarithm.
        let tiny = BigRat::from_i64(1, 1).mul(&pow2(-200));
        let inside = pow2(-201);
        let outside = pow2(-199);
        assert!(vertical_ball_clearance(&inside, &pow2(-220), &rat(1, 1), &tiny).is_none());
        let d = vertical_ball_clearance(&outside, &pow2(-220), &rat(1, 1), &tiny).unwrap();
        assert!(d.is_finite() && d > 0.0);
    }

    fn pow2(e: i32) -> BigRat {
        BigRat::from_f64(2.0f64.powi(e))
    }

    #[test]
    fn standard_chains_pass_with_positive_clearance() {
        for (n, seed) in [(2usize, 10u64), (6, 17)] {
            let plan = ConcatenationPlan::standard(n, seed).unwrap();
            let c = build_concatenation(&plan, n).unwrap();
            let rep = check_no_degeneration(&c).unwrap();
            assert!(rep.pass, "N={n}: {:?}", rep.violations);
            assert!(rep.violations.is_empty());
            assert!(rep.min_clearance > 0.0, "N={n}: clearance {}", rep.min_clearance);
            assert_eq!(rep.balls_checked, n - 1);
            if n > 2 {
                assert!(rep.min_ball_clearance.unwrap() > 0.0);
            }
            assert!(rep.max_crossing_dist <= c.delta2());
        }
    }

    #[test]
    fn single_body_chain_passes_trivially() {
        let plan = ConcatenationPlan::standard(1, 3).unwrap();
        let c = build_concatenation(&plan, 1).unwrap();
        let rep = check_no_degeneration(&c).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.balls_checked, 0);
        assert_eq!(rep.foreign_pairs, 0);
        assert_eq!(rep.crossings, 1);
        assert_eq!(rep.max_crossing_dist, 0.0);
        assert!((rep.min_clearance - c.delta2()).abs() < 1e-12);
    }

    #[test]
    fn crossing_counts_match_the_nested_family() {
        let plan = ConcatenationPlan::standard(6, 17).unwrap();
        let c = build_concatenation(&plan, 6).unwrap();
        let rep = check_no_degeneration(&c).unwrap();
        // Pairs (2,3), (1,4), (0,5): 2(r−l) crossings each.
        assert_eq!(rep.chords_checked, 3);
        assert_eq!(rep.crossings, 2 * (1 + 3 + 5));
        // Crossings hug the chain through every splice region.
        assert!(rep.max_crossing_dist < 0.5 * c.delta2());
    }

    #[test]
    fn nested_pair_families() {
        assert_eq!(nested_pairs(1), vec![]);
        assert_eq!(nested_pairs(2), vec![(0, 1)]);
        assert_eq!(nested_pairs(5), vec![(1, 3), (0, 4)]);
        assert_eq!(nested_pairs(6), vec![(2, 3), (1, 4), (0, 5)]);
        assert_eq!(nested_pairs(17).len(), 8);
        assert_eq!(nested_pairs(17)[0], (7, 9));
        assert_eq!(nested_pairs(17)[7], (0, 16));
    }
}
