//! Chain construction: realizing a concatenation plan as geometry.
//!
//! The chain is kept in per-splice local frames rather than one global
//! chart. Frame j is the coordinate system in which geodesic j is the
//! vertical over uⱼ, traversed upward, with the cusp it runs into at ∞.
//! A splice happens inside the level-h₂ horoball at that cusp: the chain
//! ascends to height h₂, crosses to the twisted copy of the next
//! geodesic — the vertical over wⱼ = vⱼ + nⱼ, traversed downward — via
//! the circular chord from (uⱼ, h₂) to (wⱼ, h₂), and the transition
//! matrix Mⱼ (sending wⱼ to ∞) re-expresses everything in frame j+1,
//! where the descent becomes the next upward vertical starting at height
//! 1/(qⱼ²h₂), qⱼ = den(wⱼ). Junctions are exact: with Mⱼ = [[a,b],[q,−p]]
//! the chord end (wⱼ, h₂) maps to (a/q, 1/(q²h₂)) in exact rational
//! arithmetic, so consecutive pieces meet to the last bit. Global f64
//! coordinates are avoided because frame-to-frame composites grow
//! geometrically (hundreds of digits for deep chains); cross-frame data
//! travels exactly via `BigMoebius` and is converted to f64 only inside
//! the one frame where it is needed, where everything is O(1)-conditioned.
//!
//! Both exterior angles of a splice equal arctan(2h₂/Δ) with Δ = wⱼ − uⱼ,
//! so the smallest twist meeting a per-vertex budget of εⱼ/2 is the
//! smallest integer with Δ ≥ 2h₂/tan(εⱼ/2); the two vertex angles then
//! sum to at most εⱼ and the chain's total exterior angle stays within
//! the plan's budget.

use serde::Serialize;

use super::bigmat::{BigMoebius, BigRat, ExactGeo};
use super::plan::ConcatenationPlan;
use crate::concat::Concatenation;
use crate::error::{Error, Result};
use crate::hyp::{
    angle_between, geodesic_between, BoundaryPoint, CompleteGeodesic, GeodesicSegment,
    HalfPlanePoint, MappingClassElement, Rational, RealMoebius, UnitTangent,
};
use crate::tol::TWIST_CAP;

/// Which part of the chain a piece realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PieceKind {
    /// Segment of generator geodesic `j`, vertical in frame `j`.
    Body(usize),
    /// Splice chord `j`, the arc at height h₂ in frame `j`.
    Chord(usize),
}

/// One traversed segment, expressed in its own frame.
#[derive(Debug, Clone)]
pub struct Piece {
    pub frame: usize,
    pub seg: GeodesicSegment,
    pub kind: PieceKind,
    /// Arclength along the chain at which this piece starts.
    pub s_start: f64,
}

/// The distinguished point of a body: the point of its geodesic lying
/// symmetrically between the level-h₂ horoballs at its two cusps (height
/// 1/q over a foot with denominator q).
#[derive(Debug, Clone)]
pub struct MidpointInfo {
    pub body: usize,
    pub point: HalfPlanePoint,
    /// Arclength along the chain.
    pub s: f64,
    /// Exact foot of the body's vertical.
    pub u: Rational,
}

/// A finite concatenation realized as local-frame pieces joined by exact
/// integer transitions.
#[derive(Debug, Clone)]
pub struct BuiltConcatenation {
    delta1: f64,
    delta2: f64,
    pieces: Vec<Piece>,
    steps: Vec<MappingClassElement>,
    /// frames[j] maps frame j to frame 0 (exact).
    frames: Vec<BigMoebius>,
    u: Vec<Rational>,
    w: Vec<Rational>,
    twists: Vec<i64>,
    angles: Vec<(f64, f64)>,
    ea_total: f64,
    midpoints: Vec<MidpointInfo>,
    total_length: f64,
    budget: Vec<f64>,
}

/// Builds the truncation to the first `n` generator geodesics. Twist
/// exponents are chosen minimal so each splice vertex angle is at most
/// half that splice's budget entry; measured angles are recorded and the
/// accumulated exterior angle never exceeds the budget total. A one-body
/// chain is the working window of its single geodesic (between its two
/// level-h₂ horoballs); longer chains start and end at body midpoints.
pub fn build_concatenation(plan: &ConcatenationPlan, n: usize) -> Result<BuiltConcatenation> {
    if n == 0 || n > plan.len() {
        return Err(Error::InvalidPlan {
            reason: format!("truncation {n} outside 1..={}", plan.len()),
        });
    }
    let h2 = plan.h2();
    let mut u = vec![plan.anchors()[0]];
    let mut w = Vec::new();
    let mut steps = Vec::new();
    let mut twists = Vec::new();
    let mut angles = Vec::new();
    for j in 0..n - 1 {
        let eps = plan.angle_budget()[j];
        let (wj, nj, pair) = choose_twist(j, u[j], plan.anchors()[j + 1], h2, eps)?;
        let m = MappingClassElement::cusp_to_infinity(&wj);
        let (a, _, c, _) = m.entries();
        u.push(Rational::new(a, c)?);
        w.push(wj);
        twists.push(nj);
        angles.push(pair);
        steps.push(m);
    }
    let mut frames = vec![BigMoebius::identity()];
    for m in &steps {
        let inv = BigMoebius::from_element(m).inverse();
        frames.push(frames.last().expect("non-empty").compose(&inv));
    }

    let mut pieces = Vec::new();
    let mut midpoints = Vec::new();
    let mut s = 0.0;
    for j in 0..n {
        let q = u[j].q() as f64;
        let x = u[j].to_f64();
        let y_bot = if j == 0 && n > 1 { 1.0 / q } else { 1.0 / (q * q * h2) };
        let y_top = if j + 1 == n && n > 1 { 1.0 / q } else { h2 };
        let seg = geodesic_between(
            &HalfPlanePoint::new(x, y_bot)?,
            &HalfPlanePoint::new(x, y_top)?,
        )?;
        let s_mid = s + (1.0 / q / y_bot).ln();
        midpoints.push(MidpointInfo {
            body: j,
            point: HalfPlanePoint::new(x, 1.0 / q)?,
            s: s_mid,
            u: u[j],
        });
        let len = seg.length;
        pieces.push(Piece { frame: j, seg, kind: PieceKind::Body(j), s_start: s });
        s += len;
        if j + 1 < n {
            let seg = geodesic_between(
                &HalfPlanePoint::new(x, h2)?,
                &HalfPlanePoint::new(w[j].to_f64(), h2)?,
            )?;
            let len = seg.length;
            pieces.push(Piece { frame: j, seg, kind: PieceKind::Chord(j), s_start: s });
            s += len;
        }
    }
    let ea_total = angles.iter().map(|(a, b)| a + b).sum();
    Ok(BuiltConcatenation {
        delta1: plan.delta1(),
        delta2: plan.delta2(),
        pieces,
        steps,
        frames,
        u,
        w,
        twists,
        angles,
        ea_total,
        midpoints,
        total_length: s,
        budget: plan.angle_budget()[..n.saturating_sub(1)].to_vec(),
    })
}

fn choose_twist(
    step: usize,
    u: Rational,
    v: Rational,
    h2: f64,
    eps: f64,
) -> Result<(Rational, i64, (f64, f64))> {
    let delta_min = 2.0 * h2 / (eps / 2.0).tan();
    let mut ntw = (delta_min + u.to_f64() - v.to_f64()).ceil() as i64;
    loop {
        if ntw.unsigned_abs() > TWIST_CAP as u64 {
            let wj = rational_add_int(v, ntw - 1)?;
            let (a1, a2) = measure_splice_angles(u, wj, h2)?;
            return Err(Error::AngleBudgetInfeasible {
                step,
                achieved: a1.max(a2),
                budget: eps,
                cap: TWIST_CAP,
            });
        }
        let wj = rational_add_int(v, ntw)?;
        let (a1, a2) = measure_splice_angles(u, wj, h2)?;
        if a1 <= eps / 2.0 + 1e-12 && a2 <= eps / 2.0 + 1e-12 {
            return Ok((wj, ntw, (a1, a2)));
        }
        ntw += 1;
    }
}

fn rational_add_int(v: Rational, n: i64) -> Result<Rational> {
    let p = v.p() as i128 + n as i128 * v.q() as i128;
    if p.unsigned_abs() > i64::MAX as u128 {
        return Err(Error::Overflow);
    }
    Rational::new(p as i64, v.q())
}

/// Both exterior angles of the splice from (u, h₂) to (w, h₂): incoming
/// (ascending vertical vs chord start) and outgoing (chord end vs
/// descending vertical). By symmetry both equal arctan(2h₂/|w − u|).
fn measure_splice_angles(u: Rational, w: Rational, h2: f64) -> Result<(f64, f64)> {
    let p1 = HalfPlanePoint::new(u.to_f64(), h2)?;
    let p2 = HalfPlanePoint::new(w.to_f64(), h2)?;
    let seg = geodesic_between(&p1, &p2)?;
    let a1 = angle_between(&UnitTangent::new(p1, 0.0), &seg.tangent_at(0.0))?;
    let a2 = angle_between(
        &seg.tangent_at(seg.length),
        &UnitTangent::new(p2, std::f64::consts::PI),
    )?;
    Ok((a1, a2))
}

impl BuiltConcatenation {
    pub fn bodies(&self) -> usize {
        self.u.len()
    }

    pub fn splices(&self) -> usize {
        self.w.len()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn body_piece(&self, j: usize) -> &Piece {
        &self.pieces[2 * j]
    }

    pub fn chord_piece(&self, j: usize) -> &Piece {
        &self.pieces[2 * j + 1]
    }

    pub fn steps(&self) -> &[MappingClassElement] {
        &self.steps
    }

    pub fn twists(&self) -> &[i64] {
        &self.twists
    }

    pub fn angles(&self) -> &[(f64, f64)] {
        &self.angles
    }

    pub fn ea_total(&self) -> f64 {
        self.ea_total
    }

    pub fn budget_used(&self) -> &[f64] {
        &self.budget
    }

    pub fn midpoints(&self) -> &[MidpointInfo] {
        &self.midpoints
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    pub fn h1(&self) -> f64 {
        1.0 / self.delta1
    }

    pub fn h2(&self) -> f64 {
        1.0 / self.delta2
    }

    pub fn body_foot(&self, j: usize) -> Rational {
        self.u[j]
    }

    pub fn splice_target(&self, j: usize) -> Rational {
        self.w[j]
    }

    /// Exact transition taking frame `from` coordinates to frame `to`.
    pub fn frame_transition(&self, from: usize, to: usize) -> BigMoebius {
        self.frames[to].inverse().compose(&self.frames[from])
    }

    /// f64 transition for neighboring frames (|from − to| ≤ 1), where
    /// the step matrices are small integers.
    pub fn neighbor_real(&self, from: usize, to: usize) -> RealMoebius {
        if from == to {
            RealMoebius::new(1.0, 0.0, 0.0, 1.0).expect("identity")
        } else if to == from + 1 {
            self.steps[from].to_real()
        } else if from == to + 1 {
            self.steps[to].to_real().inverse()
        } else {
            panic!("neighbor_real called on non-adjacent frames {from}, {to}")
        }
    }

    /// Exact y-range of a body piece (for exact disjointness tests).
    pub(crate) fn body_range_exact(&self, j: usize, h2r: &BigRat) -> (BigRat, BigRat) {
        let q = self.u[j].q();
        let n = self.bodies();
        let bot = if j == 0 && n > 1 {
            BigRat::from_i64(1, q)
        } else {
            BigRat::from_i64(1, q * q).mul(&h2r.recip())
        };
        let top = if j + 1 == n && n > 1 { BigRat::from_i64(1, q) } else { h2r.clone() };
        (bot, top)
    }

    /// Renders the chain in the frame-0 chart as a plain concatenation.
    /// Intended for shallow chains (cross-checks and small examples): the
    /// composite maps are applied in f64, which degrades geometrically
    /// with depth.
    pub fn to_global(&self) -> Result<Concatenation> {
        let mut phi = vec![RealMoebius::new(1.0, 0.0, 0.0, 1.0)?];
        for m in &self.steps {
            let next = phi.last().expect("non-empty").compose(&m.to_real().inverse());
            phi.push(next);
        }
        let mut points = vec![phi[self.pieces[0].frame].apply(&self.pieces[0].seg.start)];
        for p in &self.pieces {
            points.push(phi[p.frame].apply(&p.seg.end));
        }
        Concatenation::from_points(&points)
    }
}

/// A chord rendered in one frame: exact invariants plus the oriented
/// complete geodesic in that frame's f64 chart. The rendering is None in
/// a frame where the arc shape falls outside the stable f64 band (feet
/// nearly coincident or astronomically far apart). Chords built from
/// standard plans render in every frame — each frame keeps its own piece
/// O(1)-conditioned, and the terminal-frame radius grows only like the
/// splice offset — so a None is a guard, not an expected state; consumers
/// that do hit one can fall back to the neighboring frame, where the
/// missing body is the vertical over the splice target w with midpoint
/// at the exact point (w, 1/q).
#[derive(Debug, Clone)]
pub struct ChordInFrame {
    pub exact: ExactGeo,
    pub complete: Option<CompleteGeodesic>,
}

/// The chord between the midpoints of bodies `l` and `r`, rendered in
/// every frame it traverses (index 0 ↔ frame `l`).
#[derive(Debug, Clone)]
pub struct ChordFrames {
    pub l: usize,
    pub r: usize,
    pub per_frame: Vec<ChordInFrame>,
    /// Hyperbolic distance between the two midpoints (exact data,
    /// evaluated in logarithmic form for deep chains).
    pub length: f64,
}

impl ChordFrames {
    pub fn in_frame(&self, f: usize) -> &ChordInFrame {
        &self.per_frame[f - self.l]
    }
}

/// Computes the chord between body midpoints exactly and renders it in
/// frames l..=r. The geodesic through the two exact midpoint positions
/// is carried as rational (center, radius²) data, mapped frame to frame
/// by the exact integer steps, so the rendered arc in every frame is
/// accurate to f64 rounding regardless of chain depth.
pub fn chord_frames(c: &BuiltConcatenation, l: usize, r: usize) -> Result<ChordFrames> {
    if l >= r || r >= c.bodies() {
        return Err(Error::InvalidPlan { reason: format!("chord needs bodies l < r, got {l}, {r}") });
    }
    let (xl, yl) = midpoint_exact(c, l);
    let (xr_own, yr_own) = midpoint_exact(c, r);
    let t_rl = c.frame_transition(r, l);
    let (xr, yr) = t_rl.apply_point(&xr_own, &yr_own);
    let mut exact = ExactGeo::through_points(&xl, &yl, &xr, &yr);
    let length = exact_point_distance(&xl, &yl, &xr, &yr);

    let mut per_frame = Vec::with_capacity(r - l + 1);
    for f in l..=r {
        let complete = if renderable(&exact) {
            Some(orient_chord(c, &exact, f, r)?)
        } else {
            None
        };
        per_frame.push(ChordInFrame { exact: exact.clone(), complete });
        if f < r {
            exact = exact.map(&BigMoebius::from_element(&c.steps()[f]));
        }
    }
    Ok(ChordFrames { l, r, per_frame, length })
}

/// True when the arc's foot positions survive f64 conversion: beyond
/// radius ~1e12 the feet are dominated by cancellation noise.
fn renderable(exact: &ExactGeo) -> bool {
    match exact {
        ExactGeo::Vertical { .. } => true,
        ExactGeo::Arc { c, rsq } => {
            let r2 = rsq.to_f64();
            r2.is_finite() && c.to_f64().is_finite() && r2 < 1e24 && r2 > 1e-24
        }
    }
}

pub(crate) fn midpoint_exact(c: &BuiltConcatenation, j: usize) -> (BigRat, BigRat) {
    let u = c.body_foot(j);
    (BigRat::from_i64(u.p(), u.q()), BigRat::from_i64(1, u.q()))
}

/// 2·asinh(|p−q| / (2√(y_p y_q))) evaluated from exact coordinates; for
/// far-apart points the argument is astronomically large and the value
/// is taken in logarithmic form.
pub(crate) fn exact_point_distance(x1: &BigRat, y1: &BigRat, x2: &BigRat, y2: &BigRat) -> f64 {
    let dx = x1.sub(x2);
    let dy = y1.sub(y2);
    let num = dx.square().add(&dy.square());
    let den = BigRat::from_int(4).mul(y1).mul(y2);
    let ratio = num.mul(&den.recip());
    let lr = ratio.ln_f64();
    if lr > 60.0 {
        // 2 asinh(√r) = ln(2r + 1 + 2√(r(r+1))) → ln(4r) + O(1/r).
        lr + (4.0f64).ln()
    } else {
        2.0 * ratio.to_f64().sqrt().asinh()
    }
}

/// Orients the chord in frame f: the forward ideal endpoint is the foot
/// inside the horoball at the splice target w_f (for f < r), or the foot
/// away from the local body for the terminal frame.
fn orient_chord(
    c: &BuiltConcatenation,
    exact: &ExactGeo,
    f: usize,
    r: usize,
) -> Result<CompleteGeodesic> {
    let fwd_near = if f < r { c.splice_target(f).to_f64() } else { f64::INFINITY };
    let (back, fwd) = match exact.feet_f64() {
        Some((lo, hi)) => {
            if f < r {
                if (lo - fwd_near).abs() <= (hi - fwd_near).abs() {
                    (hi, lo)
                } else {
                    (lo, hi)
                }
            } else {
                // Terminal frame: the chord arrives from inside the ball
                // at this body's backward cusp u_r, so the back foot is
                // the one near u_r.
                let u = c.body_foot(r).to_f64();
                if (lo - u).abs() <= (hi - u).abs() {
                    (lo, hi)
                } else {
                    (hi, lo)
                }
            }
        }
        None => {
            let x = match exact {
                ExactGeo::Vertical { x } => x.to_f64(),
                ExactGeo::Arc { .. } => unreachable!("feet_f64 is None only for verticals"),
            };
            if f < r {
                if (x - fwd_near).abs() <= 0.5 {
                    return CompleteGeodesic::from_boundary(
                        BoundaryPoint::infinity(),
                        BoundaryPoint::from_real(x),
                    );
                }
                return CompleteGeodesic::from_boundary(
                    BoundaryPoint::from_real(x),
                    BoundaryPoint::infinity(),
                );
            }
            let u = c.body_foot(r).to_f64();
            if (x - u).abs() <= 0.5 {
                return CompleteGeodesic::from_boundary(
                    BoundaryPoint::from_real(x),
                    BoundaryPoint::infinity(),
                );
            }
            return CompleteGeodesic::from_boundary(
                BoundaryPoint::infinity(),
                BoundaryPoint::from_real(x),
            );
        }
    };
    CompleteGeodesic::from_boundary(BoundaryPoint::from_real(back), BoundaryPoint::from_real(fwd))
}
