//! Chordal limits and tangent-bundle coverage.
//!
//! For a built chain, the geodesic chords between symmetric body
//! midpoints form a nested family; as the span grows the chords settle
//! toward a limiting direction at the chain's center. Each chord is
//! analyzed against the portion of the chain it spans: the distance
//! profile F vanishes at both ends (the endpoints lie on the chord),
//! stays below the exterior-angle shadowing bound, and its derivative's
//! total jump variation is controlled by the spanned exterior angles.
//! Successive chords are compared in the central frame over a fixed
//! window; the limit tangent is reported only when those Cauchy gaps
//! decrease below the declared threshold. Chord geometry is carried
//! exactly between frames (see the chain module), so all of this is
//! measured in whichever frame is numerically comfortable.
//!
//! Coverage: the full chord's unit tangents, sampled along every frame
//! and folded into the fundamental domain, are compared against a fixed
//! grid in the bounded part of the unit tangent bundle. The covered
//! fraction grows as chains visit more directions, which is the
//! quantitative trace of the density mechanism.

use rayon::prelude::*;
use serde::Serialize;

use super::chain::{chord_frames, BuiltConcatenation};
use crate::error::{Error, Result};
use crate::hyp::{
    self, dist, project_to_geodesic, reduce_to_fundamental_domain, Geodesic, GeodesicSegment,
    HalfPlanePoint, UnitTangent,
};
use crate::metric::{ChartPoint, GeodesicPath, MetricBackend, PathSample};
use crate::shadow::{verify_derivative_bound, DerivativeReport, DistanceProfile};
use crate::tol::{PROFILE_SAMPLES_PER_UNIT, TOL_DERIV, TOL_GEOM, TOL_LIMIT};

/// Per-chord measurements against the spanned portion of the chain.
#[derive(Debug, Clone, Serialize)]
pub struct ChordStat {
    /// 1-based index in the nested family (innermost first).
    pub depth: usize,
    pub l: usize,
    pub r: usize,
    /// Arclength of the chain between the two midpoints.
    pub span_length: f64,
    /// Hyperbolic distance between the two midpoints.
    pub chord_length: f64,
    /// Largest distance from the chain to the chord geodesic.
    pub max_f: f64,
    /// Largest F over the outer 15% windows at each end.
    pub terminal_max_f: f64,
    /// F at the first and last profile sample.
    pub ends_f: [f64; 2],
    /// Total variation of the derivative's vertex jumps.
    pub tv_jumps: f64,
    /// tv_jumps within the spanned exterior angle plus slack.
    pub tv_ok: bool,
    /// Exterior angle accumulated across the spanned splices.
    pub ea_span: f64,
    pub deriv: DerivativeReport,
}

/// The nested-chord analysis: sampled chord paths, their central
/// tangents, the Cauchy gaps between successive chords, and the limit
/// tangent once the gaps have decreased below the threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ChordalLimit {
    pub chords: Vec<GeodesicPath>,
    pub midpoint_tangents: Vec<UnitTangent>,
    pub cauchy_gaps: Vec<f64>,
    pub limit_tangent: Option<UnitTangent>,
    pub stats: Vec<ChordStat>,
}

struct PerChord {
    stat: ChordStat,
    path: GeodesicPath,
    tangent: UnitTangent,
    arc_in_center: Geodesic,
    sigma_mid: f64,
}

/// Analyzes the nested chords determined by `vertex_indices` (body
/// indices paired outside-in around a common center). Requires at least
/// three nested pairs. For a single-body chain the chords are subarcs of
/// the one geodesic and the limit is its own tangent.
pub fn chordal_limit(c: &BuiltConcatenation, vertex_indices: &[usize]) -> Result<ChordalLimit> {
    if c.bodies() == 1 {
        return single_body_limit(c);
    }
    let pairs = nested_from_vertices(c, vertex_indices)?;
    let m = (pairs[0].0 + pairs[0].1) / 2;
    let per: Result<Vec<PerChord>> = pairs
        .par_iter()
        .enumerate()
        .map(|(k, &(l, r))| analyze_chord(c, k, l, r, m))
        .collect();
    let per = per?;

    let mut cauchy_gaps = Vec::with_capacity(per.len().saturating_sub(1));
    for k in 0..per.len() - 1 {
        cauchy_gaps.push(chord_gap(&per[k], &per[k + 1]));
    }
    // Gaps between nearly identical arcs bottom out at an
    // arc-reconstruction noise floor around 1e-12, where successive
    // values wobble without geometric meaning; only growth above the
    // geometric tolerance counts against convergence.
    let decreasing = cauchy_gaps.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9) + TOL_GEOM);
    let limit_tangent = if cauchy_gaps.len() >= 2
        && decreasing
        && cauchy_gaps.last().copied().unwrap_or(f64::INFINITY) < TOL_LIMIT
    {
        let t = per.last().expect("non-empty").tangent;
        Some(fold_tangent(&t)?)
    } else {
        None
    };
    Ok(ChordalLimit {
        chords: per.iter().map(|p| p.path.clone()).collect(),
        midpoint_tangents: per.iter().map(|p| p.tangent).collect(),
        cauchy_gaps,
        limit_tangent,
        stats: per.into_iter().map(|p| p.stat).collect(),
    })
}

/// Pairs the vertex list outside-in and validates strict nesting around
/// a common center body.
fn nested_from_vertices(c: &BuiltConcatenation, vertex_indices: &[usize]) -> Result<Vec<(usize, usize)>> {
    let mut v = vertex_indices.to_vec();
    v.sort_unstable();
    v.dedup();
    if v.len() != vertex_indices.len() {
        return Err(Error::InvalidPlan { reason: "duplicate vertex indices".into() });
    }
    if let Some(&hi) = v.last() {
        if hi >= c.bodies() {
            return Err(Error::InvalidPlan {
                reason: format!("vertex index {hi} outside 0..{}", c.bodies()),
            });
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..v.len() / 2)
        .map(|i| (v[i], v[v.len() - 1 - i]))
        .collect();
    pairs.reverse();
    if pairs.len() < 3 {
        return Err(Error::InsufficientData {
            reason: format!("need at least 3 nested chord pairs, got {}", pairs.len()),
        });
    }
    let center = pairs[0].0 + pairs[0].1;
    for w in pairs.windows(2) {
        let ((l0, r0), (l1, r1)) = (w[0], w[1]);
        if !(l1 < l0 && r0 < r1) {
            return Err(Error::InvalidPlan {
                reason: format!("pairs ({l0},{r0}) and ({l1},{r1}) are not strictly nested"),
            });
        }
    }
    for &(l, r) in &pairs {
        if l + r != center {
            return Err(Error::InvalidPlan {
                reason: format!("pair ({l},{r}) off the common center {}", center as f64 / 2.0),
            });
        }
        if l >= r {
            return Err(Error::InvalidPlan { reason: format!("degenerate pair ({l},{r})") });
        }
    }
    if center % 2 != 0 {
        return Err(Error::InvalidPlan {
            reason: "chord family must center on a body".into(),
        });
    }
    Ok(pairs)
}

fn analyze_chord(
    c: &BuiltConcatenation,
    k: usize,
    l: usize,
    r: usize,
    m: usize,
) -> Result<PerChord> {
    let ch = chord_frames(c, l, r)?;

    // Chain portion between the midpoints, each part paired with the
    // chord's geodesic in that part's frame. The final body's tail is
    // expressed in the previous frame (vertical over the splice target),
    // where the chord stays well-conditioned.
    let mut parts: Vec<(GeodesicSegment, Geodesic)> = Vec::new();
    let geo_in = |f: usize| -> Result<Geodesic> {
        ch.in_frame(f)
            .complete
            .as_ref()
            .map(|g| g.geo)
            .ok_or_else(|| Error::ProjectionFailure {
                reason: format!("chord ({l},{r}) unrenderable in frame {f}"),
            })
    };
    let bl = c.body_piece(l);
    let off = c.midpoints()[l].s - bl.s_start;
    parts.push((bl.seg.slice(off, bl.seg.length)?, geo_in(l)?));
    parts.push((c.chord_piece(l).seg, geo_in(l)?));
    for f in l + 1..r {
        parts.push((c.body_piece(f).seg, geo_in(f)?));
        parts.push((c.chord_piece(f).seg, geo_in(f)?));
    }
    let w = c.splice_target(r - 1);
    let qr = c.body_foot(r).q() as f64;
    let tail = GeodesicSegment::new(
        HalfPlanePoint::new(w.to_f64(), c.h2())?,
        HalfPlanePoint::new(w.to_f64(), 1.0 / qr)?,
    )?;
    parts.push((tail, geo_in(r - 1)?));

    let prof = profile_against_parts(&parts, PROFILE_SAMPLES_PER_UNIT / 4);
    let ea_span: f64 = c.angles()[l..r].iter().map(|(a, b)| a + b).sum();
    let deriv = verify_derivative_bound(&prof, ea_span);
    let tv_jumps: f64 = prof.jumps.iter().map(|j| j.abs()).sum();
    let span_length: f64 = parts.iter().map(|(seg, _)| seg.length).sum();
    let (t0, t1) = (0.15 * span_length, 0.85 * span_length);
    let mut terminal_max_f = 0.0f64;
    for (&s, &f) in prof.s.iter().zip(&prof.f) {
        if s <= t0 || s >= t1 {
            terminal_max_f = terminal_max_f.max(f);
        }
    }
    let ends_f = [prof.f[0], *prof.f.last().expect("profile non-empty")];

    let center = ch
        .in_frame(m)
        .complete
        .as_ref()
        .ok_or_else(|| Error::ProjectionFailure {
            reason: format!("chord ({l},{r}) unrenderable in center frame {m}"),
        })?;
    let p0 = c.midpoints()[m].point;
    let proj = project_to_geodesic(&p0, &center.geo);
    let sigma_mid = center.geo.sigma_of(&proj.foot);
    let tangent = center.geo.tangent_at_sigma(sigma_mid, center.forward());
    let path = sample_path(&center.geo, sigma_mid, ch.length / 2.0, center.forward());

    Ok(PerChord {
        stat: ChordStat {
            depth: k + 1,
            l,
            r,
            span_length,
            chord_length: ch.length,
            max_f: prof.max_f,
            terminal_max_f,
            ends_f,
            tv_jumps,
            tv_ok: tv_jumps <= ea_span + TOL_DERIV,
            ea_span,
            deriv,
        },
        path,
        tangent,
        arc_in_center: center.geo,
        sigma_mid,
    })
}

/// Distance profile of chain parts against per-part target geodesics,
/// with the same sampling and bookkeeping conventions as the shadowing
/// profiles (per-piece runs, both-sided junction samples, cos-θ slopes).
fn profile_against_parts(parts: &[(GeodesicSegment, Geodesic)], spu: usize) -> DistanceProfile {
    let mut s_all = Vec::new();
    let mut f_all = Vec::new();
    let mut fp_all = Vec::new();
    let mut piece_ends = Vec::new();
    let mut s_base = 0.0;
    for (seg, target) in parts {
        let n = ((seg.length * spu as f64).ceil() as usize).max(8);
        for i in 0..=n {
            let local = seg.length * i as f64 / n as f64;
            let p = seg.point_at(local);
            let tangent = seg.tangent_at(local);
            let proj = project_to_geodesic(&p, target);
            let f_prime = match hyp::angle_between(&tangent, &proj.away) {
                Ok(theta) => theta.cos(),
                Err(_) => 0.0,
            };
            s_all.push(s_base + local);
            f_all.push(proj.dist);
            fp_all.push(f_prime);
        }
        piece_ends.push(s_all.len());
        s_base += seg.length;
    }
    let mut jumps = Vec::with_capacity(piece_ends.len().saturating_sub(1));
    for w in piece_ends.windows(2) {
        jumps.push(fp_all[w[0]] - fp_all[w[0] - 1]);
    }
    let mut fd_cross_check: f64 = 0.0;
    let starts = std::iter::once(0).chain(piece_ends.iter().copied());
    for (start, end) in starts.zip(piece_ends.iter().copied()) {
        for i in start + 1..end.saturating_sub(1) {
            if f_all[i] < 1e-4 {
                continue;
            }
            let ds = s_all[i + 1] - s_all[i - 1];
            if ds <= 0.0 {
                continue;
            }
            let central = (f_all[i + 1] - f_all[i - 1]) / ds;
            fd_cross_check = fd_cross_check.max((central - fp_all[i]).abs());
        }
    }
    let max_f = f_all.iter().copied().fold(0.0, f64::max);
    DistanceProfile { s: s_all, f: f_all, f_prime: fp_all, piece_ends, jumps, max_f, fd_cross_check }
}

/// Samples a chord around its central crossing as a unit-speed path in
/// the central frame's chart.
fn sample_path(geo: &Geodesic, sigma_mid: f64, half_span: f64, forward: bool) -> GeodesicPath {
    let half = half_span.min(25.0);
    let n = 128usize;
    let mut samples = Vec::with_capacity(n + 1);
    let (lo, hi) = (sigma_mid - half, sigma_mid + half);
    for i in 0..=n {
        let sigma = lo + (hi - lo) * i as f64 / n as f64;
        let p = geo.point_at_sigma(sigma);
        let t = geo.tangent_at_sigma(sigma, forward);
        let v = t.vector();
        let s = if forward { sigma - lo } else { hi - sigma };
        samples.push(PathSample {
            s,
            pos: ChartPoint::new(p.x(), p.y()),
            vel: [p.y() * v.0, p.y() * v.1],
        });
    }
    if !forward {
        samples.reverse();
    }
    GeodesicPath { backend: MetricBackend::Hyperbolic, samples, stop: None }
}

/// Gap between successive chords: worst pointwise distance from a fixed
/// window of the inner chord to the outer chord's geodesic, plus the
/// base and direction mismatch of the central tangents.
fn chord_gap(a: &PerChord, b: &PerChord) -> f64 {
    let mut worst = 0.0f64;
    let samples = 33;
    for i in 0..=samples {
        let sigma = a.sigma_mid - 1.0 + 2.0 * i as f64 / samples as f64;
        let z = a.arc_in_center.point_at_sigma(sigma);
        worst = worst.max(b.arc_in_center.dist_to(&z));
    }
    let base_gap = dist(&a.tangent.base, &b.tangent.base);
    let dir_gap = angle_diff(a.tangent.dir(), b.tangent.dir());
    worst + base_gap + dir_gap
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % (2.0 * std::f64::consts::PI);
    d.min(2.0 * std::f64::consts::PI - d)
}

/// Folds a tangent into the fundamental domain.
fn fold_tangent(t: &UnitTangent) -> Result<UnitTangent> {
    let (_, g) = reduce_to_fundamental_domain(&t.base)?;
    Ok(g.apply_tangent(t))
}

/// Single-body chains: the chords are central subarcs of the one
/// geodesic window, every gap vanishes, and the limit is the window's
/// own midpoint tangent.
fn single_body_limit(c: &BuiltConcatenation) -> Result<ChordalLimit> {
    let piece = c.body_piece(0);
    let mid = c.midpoints()[0].s - piece.s_start;
    let half_max = mid.min(piece.seg.length - mid);
    let mut per = Vec::new();
    for (k, frac) in [0.25, 0.5, 0.75].into_iter().enumerate() {
        let t = frac * half_max;
        let slice = piece.seg.slice(mid - t, mid + t)?;
        let parts = vec![(slice, piece.seg.geo)];
        let prof = profile_against_parts(&parts, PROFILE_SAMPLES_PER_UNIT / 4);
        let deriv = verify_derivative_bound(&prof, 0.0);
        let tangent = piece.seg.tangent_at(mid);
        let sigma_mid = piece.seg.geo.sigma_of(&c.midpoints()[0].point);
        let forward_sigma = piece.seg.geo.sigma_of(&piece.seg.end) >= piece.seg.geo.sigma_of(&piece.seg.start);
        let path = sample_path(&piece.seg.geo, sigma_mid, t, forward_sigma);
        per.push(PerChord {
            stat: ChordStat {
                depth: k + 1,
                l: 0,
                r: 0,
                span_length: 2.0 * t,
                chord_length: 2.0 * t,
                max_f: prof.max_f,
                terminal_max_f: prof.max_f,
                ends_f: [prof.f[0], *prof.f.last().expect("non-empty")],
                tv_jumps: 0.0,
                tv_ok: true,
                ea_span: 0.0,
                deriv,
            },
            path,
            tangent,
            arc_in_center: piece.seg.geo,
            sigma_mid,
        });
    }
    let tangent = per.last().expect("non-empty").tangent;
    Ok(ChordalLimit {
        chords: per.iter().map(|p| p.path.clone()).collect(),
        midpoint_tangents: per.iter().map(|p| p.tangent).collect(),
        cauchy_gaps: vec![0.0; per.len() - 1],
        limit_tangent: Some(fold_tangent(&tangent)?),
        stats: per.into_iter().map(|p| p.stat).collect(),
    })
}

/// Unit tangents along the full chord, sampled per frame and folded into
/// the fundamental domain. `samples_per_unit` controls the σ-resolution.
pub fn chord_tangent_samples(
    c: &BuiltConcatenation,
    samples_per_unit: usize,
) -> Result<Vec<UnitTangent>> {
    if c.bodies() < 2 {
        return Err(Error::InsufficientData {
            reason: "tangent sampling needs at least two bodies".into(),
        });
    }
    let l = 0usize;
    let r = c.bodies() - 1;
    let ch = chord_frames(c, l, r)?;
    let y_floor = 1e-5f64;
    let mut out = Vec::new();
    for f in l..r {
        let Some(complete) = ch.in_frame(f).complete.as_ref() else { continue };
        let fwd = complete.forward();
        let (mut lo, mut hi) = match complete.geo {
            Geodesic::Arc { radius, .. } => {
                let s = (2.0 * radius / y_floor).ln();
                (-s, s)
            }
            Geodesic::Vertical { .. } => (-25.0, 25.0),
        };
        if f == l {
            let s0 = complete.geo.sigma_of(&c.midpoints()[l].point);
            if fwd {
                lo = lo.max(s0);
            } else {
                hi = hi.min(s0);
            }
        }
        if f == r - 1 {
            let w = c.splice_target(r - 1).to_f64();
            let qr = c.body_foot(r).q() as f64;
            let endpoint = HalfPlanePoint::new(w, 1.0 / qr)?;
            let s1 = complete.geo.sigma_of(&endpoint);
            if fwd {
                hi = hi.min(s1);
            } else {
                lo = lo.max(s1);
            }
        }
        if !(hi > lo) {
            continue;
        }
        let n = (((hi - lo) * samples_per_unit as f64).ceil() as usize).max(2);
        for i in 0..=n {
            let sigma = lo + (hi - lo) * i as f64 / n as f64;
            let t = complete.geo.tangent_at_sigma(sigma, fwd);
            out.push(fold_tangent(&t)?);
        }
    }
    Ok(out)
}

const GRID_X: usize = 10;
const GRID_Y: usize = 8;
const GRID_TH: usize = 12;
const GRID_Y_LO: f64 = 0.85;
const GRID_Y_HI: f64 = 4.0;

/// Centers of the coverage grid over the bounded part of the unit
/// tangent bundle of the fundamental domain: x ∈ [−1/2, 1/2], y on a
/// geometric ladder up to the cusp cut, all directions; cells below the
/// unit circle are excluded.
pub fn bundle_grid_cells() -> Vec<UnitTangent> {
    let mut cells = Vec::new();
    let rho = (GRID_Y_HI / GRID_Y_LO).powf(1.0 / GRID_Y as f64);
    for ix in 0..GRID_X {
        let x = -0.5 + (ix as f64 + 0.5) / GRID_X as f64;
        for iy in 0..GRID_Y {
            let y = GRID_Y_LO * rho.powf(iy as f64 + 0.5);
            if x * x + y * y < 1.0 {
                continue;
            }
            for it in 0..GRID_TH {
                let theta = -std::f64::consts::PI
                    + (it as f64 + 0.5) * 2.0 * std::f64::consts::PI / GRID_TH as f64;
                let base = HalfPlanePoint::new(x, y).expect("grid heights are positive");
                cells.push(UnitTangent::new(base, theta));
            }
        }
    }
    cells
}

/// Fraction of coverage-grid cells having a sample within `eps` in the
/// combined base-distance + direction metric.
pub fn density_coverage(tangents: &[UnitTangent], eps: f64) -> f64 {
    let cells = bundle_grid_cells();
    if cells.is_empty() {
        return 0.0;
    }
    let covered = cells
        .par_iter()
        .filter(|cell| {
            tangents.iter().any(|t| {
                let d = dist(&cell.base, &t.base);
                d <= eps && d + angle_diff(cell.dir(), t.dir()) <= eps
            })
        })
        .count();
    covered as f64 / cells.len() as f64
}
