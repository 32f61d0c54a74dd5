//! Twisting cusp-bound geodesics into chords.
//!
//! Two geodesics running into the same cusp concatenate only through the
//! cusp itself. Applying the n-fold twist about the cusp's cross-section
//! to the outgoing geodesic and replacing the excursion by the connecting
//! chord produces a genuine path whose two junction angles (the "gaps"
//! against the original geodesics) shrink as `n` grows, while the chord
//! stays in the thick part at the price of ever more winding.
//!
//! * Half-plane backend (cusp at ∞, twist `z ↦ z + 1`): everything is
//!   closed-form. The chord from `(x₁, h)` to `(x₂ + n, h)` is a
//!   semicircle; both gaps equal `arctan(2h/Δ)` for offset
//!   `Δ = n + x₂ − x₁`, the chord length is `2·asinh(Δ/(2h))`, and the
//!   shortest cusp cross-section met has length `1/R`, `R` the semicircle
//!   radius.
//! * Cusp-model backend: the surface is rotationally symmetric in `τ`, so
//!   chords conserve the Clairaut invariant `J = f(r)·sin ψ` (`f` the
//!   cross-section circumference, `ψ` the angle from radial). The chord
//!   between `(ℓ₀, ∓Δτ/2)` is recovered by root-finding `J` against the
//!   twist offset
//!   `Δτ(J) = 2∫_{r_min}^{r₀} J / (f·√(f² − J²)) dr`, with turning point
//!   `f(r_min) = J`; its length is `2∫ f/√(f² − J²) dr` and the endpoint
//!   gap is `arcsin(J/f(r₀))`. The integrands have an inverse-square-root
//!   endpoint singularity removed exactly by the substitution
//!   `r = r_min + u²`, after which Gauss–Legendre converges spectrally.

use serde::{Deserialize, Serialize};

use crate::concat::Concatenation;
use crate::error::{Error, Result};
use crate::hyp::geodesic::{Geodesic, GeodesicSegment};
use crate::hyp::point::{HalfPlanePoint, UnitTangent};
use crate::hyp::{self};
use crate::metric::{
    wp_circumference, wp_ell_at_distance, wp_r_of_circumference, wp_radial_distance, WpParams,
};
use crate::quad;

/// Number of Gauss–Legendre nodes for the chord integrals (spectral
/// accuracy; 160 nodes leaves the quadrature error far below 1e-12).
const QUAD_NODES: usize = 160;

/// One row of a twist ladder, in the shared report schema: `min_ell` is
/// the length of the shortest cusp cross-section the chord meets (`ℓ` on
/// the cusp model, horocycle length `1/y` on the half-plane).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwistRow {
    pub n: i64,
    pub initial_gap: f64,
    pub terminal_gap: f64,
    pub chord_length: f64,
    pub min_ell: f64,
}

/// A twisted chord on the half-plane backend.
#[derive(Debug, Clone)]
pub struct TwistChord {
    pub n: i64,
    /// Horizontal offset `n + x₂ − x₁` actually spanned.
    pub offset: f64,
    pub chord: GeodesicSegment,
    /// Turning angle at the start junction (against the upward vertical).
    pub initial_gap: f64,
    /// Turning angle at the end junction (against the downward vertical).
    pub terminal_gap: f64,
    /// Length of the shortest cusp cross-section met, `1/max_y`.
    pub min_cusp_len: f64,
}

impl TwistChord {
    pub fn row(&self) -> TwistRow {
        TwistRow {
            n: self.n,
            initial_gap: self.initial_gap,
            terminal_gap: self.terminal_gap,
            chord_length: self.chord.length,
            min_ell: self.min_cusp_len,
        }
    }
}

/// Replaces the cusp excursion between the vertical geodesic up from `p1`
/// and the vertical geodesic down to `p2` by the chord to the `n`-times
/// twisted copy of `p2`.
pub fn twist_concatenate(p1: &HalfPlanePoint, p2: &HalfPlanePoint, n: i64) -> Result<TwistChord> {
    let q = HalfPlanePoint::new(p2.x() + n as f64, p2.y())?;
    if hyp::dist(p1, &q) == 0.0 {
        return Err(Error::DegenerateChord);
    }
    let chord = GeodesicSegment::new(*p1, q)?;
    let up = UnitTangent::new(*p1, 0.0);
    let down = UnitTangent::new(q, std::f64::consts::PI);
    let initial_gap = hyp::angle_between(&chord.tangent_at(0.0), &up)?;
    let terminal_gap = hyp::angle_between(&chord.tangent_at(chord.length), &down)?;
    let max_y = match chord.geo {
        Geodesic::Vertical { .. } => p1.y().max(q.y()),
        Geodesic::Arc { radius, .. } => {
            let s0 = chord.geo.sigma_of(p1);
            let s1 = chord.geo.sigma_of(&q);
            if s0.min(s1) <= 0.0 && 0.0 <= s0.max(s1) {
                radius
            } else {
                p1.y().max(q.y())
            }
        }
    };
    Ok(TwistChord {
        n,
        offset: q.x() - p1.x(),
        chord,
        initial_gap,
        terminal_gap,
        min_cusp_len: 1.0 / max_y,
    })
}

/// The twisted concatenation as an explicit path: ascend the vertical for
/// `tail` units, cross the chord, descend for `tail` units.
pub fn twisted_path(
    p1: &HalfPlanePoint,
    p2: &HalfPlanePoint,
    n: i64,
    tail: f64,
) -> Result<(Concatenation, TwistChord)> {
    let tc = twist_concatenate(p1, p2, n)?;
    let q = tc.chord.end;
    let low1 = HalfPlanePoint::new(p1.x(), p1.y() * (-tail).exp())?;
    let low2 = HalfPlanePoint::new(q.x(), q.y() * (-tail).exp())?;
    let path = Concatenation::from_points(&[low1, *p1, q, low2])?;
    Ok((path, tc))
}

/// Twist ladder on the half-plane backend.
pub fn twist_ladder_hyperbolic(
    p1: &HalfPlanePoint,
    p2: &HalfPlanePoint,
    ns: &[i64],
) -> Result<Vec<TwistRow>> {
    ns.iter().map(|&n| Ok(twist_concatenate(p1, p2, n)?.row())).collect()
}

/// A twisted chord on the cusp-model backend, symmetric about `τ = 0`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WpTwistChord {
    pub delta_tau: f64,
    /// Clairaut invariant of the chord.
    pub j: f64,
    pub length: f64,
    /// Level of the turning point — the deepest the chord dives.
    pub min_ell: f64,
    /// Endpoint angle from the radial direction (equal at both ends).
    pub gap: f64,
}

impl WpTwistChord {
    pub fn row(&self, n: i64) -> TwistRow {
        TwistRow {
            n,
            initial_gap: self.gap,
            terminal_gap: self.gap,
            chord_length: self.length,
            min_ell: self.min_ell,
        }
    }
}

/// Twist offset spanned by the chord with Clairaut invariant `j`, launched
/// from radial distance `r0`.
fn wp_delta_tau(w: &WpParams, r0: f64, j: f64) -> f64 {
    let r_min = wp_r_of_circumference(w, j);
    let u_max = (r0 - r_min).max(0.0).sqrt();
    quad::integrate(
        |u| {
            let r = r_min + u * u;
            let f = wp_circumference(w, r);
            let det = (f * f - j * j).max(0.0);
            if det == 0.0 {
                return 0.0;
            }
            2.0 * u * j / (f * det.sqrt())
        },
        0.0,
        u_max,
        QUAD_NODES,
    ) * 2.0
}

/// Length of the same chord.
fn wp_chord_length(w: &WpParams, r0: f64, j: f64) -> f64 {
    let r_min = wp_r_of_circumference(w, j);
    let u_max = (r0 - r_min).max(0.0).sqrt();
    quad::integrate(
        |u| {
            let r = r_min + u * u;
            let f = wp_circumference(w, r);
            let det = (f * f - j * j).max(0.0);
            if det == 0.0 {
                return 0.0;
            }
            2.0 * u * f / det.sqrt()
        },
        0.0,
        u_max,
        QUAD_NODES,
    ) * 2.0
}

/// Solves the symmetric two-point problem between `(ℓ₀, −Δτ/2)` and
/// `(ℓ₀, +Δτ/2)` on the cusp model by root-finding the Clairaut invariant.
pub fn wp_twist_chord(w: &WpParams, ell0: f64, delta_tau: f64) -> Result<WpTwistChord> {
    w.validate()?;
    if !(ell0 > 0.0 && ell0 <= w.ell_max) {
        return Err(Error::InvalidLengthCoord { ell: ell0 });
    }
    let target = delta_tau.abs();
    if target == 0.0 {
        return Err(Error::DegenerateChord);
    }
    let r0 = wp_radial_distance(w, ell0);
    let f_max = wp_circumference(w, r0);

    // Δτ(J) decreases from ∞ (J → 0) to 0 (J → f(r₀)); bracket and bisect
    // geometrically.
    let mut hi = f_max * (1.0 - 1e-12);
    let mut lo = f_max * 0.5;
    let mut guard = 0;
    while wp_delta_tau(w, r0, lo) <= target {
        lo *= 0.25;
        guard += 1;
        if guard > 500 {
            return Err(Error::NoConvergence { endpoint_error: target, iterations: guard });
        }
    }
    let mut iterations = guard;
    for _ in 0..200 {
        iterations += 1;
        let mid = (lo * hi).sqrt();
        let dt = wp_delta_tau(w, r0, mid);
        if (dt - target).abs() <= 1e-12 * target.max(1.0) {
            lo = mid;
            hi = mid;
            break;
        }
        if dt > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-15 * hi {
            break;
        }
    }
    let j = (lo * hi).sqrt();
    let achieved = wp_delta_tau(w, r0, j);
    // The fixed-node quadrature behind wp_delta_tau is non-monotone in J at
    // the ~1e-9 scale (nodes move with the turning radius), so acceptance
    // must sit above that noise floor.
    if (achieved - target).abs() > 1e-7 * target.max(1.0) {
        return Err(Error::NoConvergence {
            endpoint_error: (achieved - target).abs(),
            iterations,
        });
    }
    let r_min = wp_r_of_circumference(w, j);
    Ok(WpTwistChord {
        delta_tau: target,
        j,
        length: wp_chord_length(w, r0, j),
        min_ell: wp_ell_at_distance(w, r_min),
        gap: (j / f_max).asin(),
    })
}

/// Twist ladder on the cusp model: the `n`-fold twist at level `ℓ₀`
/// offsets `τ` by `n·ℓ₀`.
pub fn twist_ladder_wp(w: &WpParams, ell0: f64, ns: &[i64]) -> Result<Vec<TwistRow>> {
    ns.iter()
        .map(|&n| Ok(wp_twist_chord(w, ell0, n as f64 * ell0)?.row(n)))
        .collect()
}

/// Summary statistics of a twist ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwistSpiralStats {
    /// Both junction gaps decrease along the ladder.
    pub gaps_decreasing: bool,
    /// Chord length strictly increases along the ladder.
    pub lengths_increasing: bool,
    /// The deepest cross-section level decreases along the ladder.
    pub min_ell_decreasing: bool,
    /// Smallest per-unit-twist length increment observed.
    pub length_rate: f64,
    /// Smallest shift making `length(n) ≥ (n − n0)·length_rate` hold
    /// across the ladder.
    pub n0: i64,
    /// Whether the linear lower bound above holds on every ladder row.
    pub linear_bound_holds: bool,
    /// Larger of the two gaps on the final row.
    pub final_gap: f64,
    pub max_length: f64,
}

/// Extracts the spiral behavior from a ladder of twist rows (sorted by
/// strictly increasing `n`).
pub fn twist_spiral_analysis(rows: &[TwistRow]) -> Result<TwistSpiralStats> {
    if rows.len() < 2 {
        return Err(Error::InsufficientData {
            reason: format!("twist ladder needs at least 2 rows, got {}", rows.len()),
        });
    }
    if rows.windows(2).any(|w| w[1].n <= w[0].n) {
        return Err(Error::InvalidPlan { reason: "twist ladder must increase in n".into() });
    }
    let eps = 1e-12;
    let gaps_decreasing = rows.windows(2).all(|w| {
        w[1].initial_gap < w[0].initial_gap + eps && w[1].terminal_gap < w[0].terminal_gap + eps
    });
    let lengths_increasing =
        rows.windows(2).all(|w| w[1].chord_length > w[0].chord_length - eps);
    let min_ell_decreasing = rows.windows(2).all(|w| w[1].min_ell < w[0].min_ell + eps);
    let length_rate = rows
        .windows(2)
        .map(|w| (w[1].chord_length - w[0].chord_length) / (w[1].n - w[0].n) as f64)
        .fold(f64::INFINITY, f64::min);
    if !(length_rate.is_finite() && length_rate > 0.0) {
        return Err(Error::InsufficientData {
            reason: format!("nonpositive length rate {length_rate}"),
        });
    }
    let n0 = rows
        .iter()
        .map(|r| (r.n as f64 - r.chord_length / length_rate).ceil() as i64)
        .max()
        .expect("nonempty")
        .max(0);
    let linear_bound_holds =
        rows.iter().all(|r| r.chord_length >= (r.n - n0) as f64 * length_rate - 1e-12);
    let last = rows.last().expect("nonempty");
    Ok(TwistSpiralStats {
        gaps_decreasing,
        lengths_increasing,
        min_ell_decreasing,
        length_rate,
        n0,
        linear_bound_holds,
        final_gap: last.initial_gap.max(last.terminal_gap),
        max_length: rows.iter().map(|r| r.chord_length).fold(0.0, f64::max),
    })
}
