//! Chord-shadowing calculus: distance profiles of concatenations against
//! the geodesic carrying a chord, the derivative bound by the total
//! exterior angle, and the comparison-triangle distance bound.
//!
//! For a concatenation C with total exterior angle `ea ≤ 1/2`, the chord
//! through C's endpoints shadows C: every point of C stays within
//! `B(ea, κ) = arccosh((sin²φ + 1)/cos²φ) / √|κ|`, `φ = ea + arcsin(ea)`.
//! The distance profile `F(s) = d(C(s), γ)` carries the structure
//! everything is checked on: F vanishes at both ends, is convex along each
//! geodesic piece, is 1-Lipschitz, obeys the first-variation identity
//! `F′ = cos θ` against the away-fiber of the nearest-point projection,
//! its slope never exceeds `ea`, and its vertex jumps are bounded by the
//! vertex angles (the cosine is 1-Lipschitz). The experiment randomizes
//! twisted concatenations under an exterior-angle cap and measures all of
//! this against the curvature bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concat::{exterior_angle_total, Concatenation};
use crate::error::{Error, Result};
use crate::hyp::geodesic::{project_to_geodesic, project_to_segment, Geodesic, GeodesicSegment};
use crate::hyp::point::HalfPlanePoint;
use crate::hyp::{self};
use crate::tol;
use crate::twist::twisted_path;

/// Shadowing bound `B(ea, κ)`; requires `0 ≤ ea ≤ 1/2` and `κ < 0`.
pub fn bound_from_ea(ea: f64, kappa: f64) -> Result<f64> {
    if !(ea >= 0.0 && ea <= 0.5) {
        return Err(Error::EaOutOfRange { ea });
    }
    if !(kappa.is_finite() && kappa < 0.0) {
        return Err(Error::Config {
            field: "kappa".into(),
            reason: format!("shadowing bound needs negative curvature, got {kappa}"),
        });
    }
    let phi = ea + ea.asin();
    let ratio = (phi.sin().powi(2) + 1.0) / phi.cos().powi(2);
    Ok(ratio.acosh() / kappa.abs().sqrt())
}

/// Sampled distance profile of a concatenation against a geodesic.
///
/// Samples run piece by piece (each junction is sampled on both sides), so
/// within-piece statements such as convexity never straddle a corner. The
/// derivative comes from the first-variation formula `F′ = cos θ` against
/// the away-fiber; `fd_cross_check` records its worst disagreement with a
/// central finite difference away from the zero set of F.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistanceProfile {
    pub s: Vec<f64>,
    pub f: Vec<f64>,
    pub f_prime: Vec<f64>,
    /// Exclusive end index of each piece's sample run.
    pub piece_ends: Vec<usize>,
    /// F′ discontinuity (outgoing − incoming) at each interior vertex.
    pub jumps: Vec<f64>,
    /// Largest sampled F.
    pub max_f: f64,
    /// Worst |F′ − central difference| over well-separated samples.
    pub fd_cross_check: f64,
}

impl DistanceProfile {
    /// Largest sampled value and the arclength where it sits.
    pub fn max_sample(&self) -> (f64, f64) {
        let mut best = (0.0, f64::NEG_INFINITY);
        for (&s, &f) in self.s.iter().zip(&self.f) {
            if f > best.1 {
                best = (s, f);
            }
        }
        best
    }

    /// Iterates `(start, end)` index ranges of the per-piece runs.
    pub fn pieces(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let starts = std::iter::once(0).chain(self.piece_ends.iter().copied());
        starts.zip(self.piece_ends.iter().copied())
    }
}

/// Samples `F(s) = d(C(s), γ)` at `samples_per_unit` per unit of arclength
/// (at least 8 intervals per piece), with `F′` from the cos-θ formula.
pub fn distance_profile(
    c: &Concatenation,
    target: &Geodesic,
    samples_per_unit: usize,
) -> DistanceProfile {
    let mut s_all = Vec::new();
    let mut f_all = Vec::new();
    let mut fp_all = Vec::new();
    let mut piece_ends = Vec::new();
    let mut s_base = 0.0;
    for seg in c.segments() {
        let n = ((seg.length * samples_per_unit as f64).ceil() as usize).max(8);
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

/// Max of `F`, golden-section refined around the best sample.
pub fn max_distance(c: &Concatenation, target: &Geodesic, samples_per_unit: usize) -> (f64, f64) {
    let prof = distance_profile(c, target, samples_per_unit);
    let (mut s_star, mut f_star) = prof.max_sample();
    let idx = prof.f.iter().position(|&f| f == f_star).unwrap_or(0);
    let lo = if idx > 0 { prof.s[idx - 1] } else { prof.s[0] };
    let hi = if idx + 1 < prof.s.len() { prof.s[idx + 1] } else { *prof.s.last().unwrap() };
    let eval = |s: f64| target.dist_to(&c.point_at(s));
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let (mut x1, mut x2) = (b - phi * (b - a), a + phi * (b - a));
    let (mut f1, mut f2) = (eval(x1), eval(x2));
    for _ in 0..60 {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2);
        }
    }
    let s_mid = 0.5 * (a + b);
    let f_mid = eval(s_mid);
    if f_mid > f_star {
        s_star = s_mid;
        f_star = f_mid;
    }
    (s_star, f_star)
}

/// Doubles the profile resolution until the measured maximum moves by less
/// than [`tol::PROFILE_STABILIZE`]; returns `(s*, F*, resolution used)`.
pub fn max_distance_stabilized(c: &Concatenation, target: &Geodesic) -> (f64, f64, usize) {
    let mut spu = tol::PROFILE_SAMPLES_PER_UNIT;
    let (mut s_star, mut f_star) = max_distance(c, target, spu);
    for _ in 0..4 {
        let next = spu * 2;
        let (s2, f2) = max_distance(c, target, next);
        let moved = (f2 - f_star).abs();
        s_star = s2;
        f_star = f2;
        spu = next;
        if moved < tol::PROFILE_STABILIZE {
            break;
        }
    }
    (s_star, f_star, spu)
}

/// Measured regularity of a distance profile.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DerivativeReport {
    /// Largest |F′| over all samples.
    pub max_abs_slope: f64,
    /// Arclength where the largest |F′| was attained.
    pub argmax_slope: f64,
    /// Slopes never exceed 1 (distance functions are 1-Lipschitz).
    pub lipschitz_ok: bool,
    /// Slopes stay within the exterior-angle budget plus slack.
    pub ea_bound_ok: bool,
    /// Per-piece convexity of F (second differences bounded below).
    pub convex_ok: bool,
    /// Every vertex jump of F′ is bounded by the total angle budget.
    pub jump_ok: bool,
    /// Worst deviation of F′ from a central finite difference.
    pub first_variation_err: f64,
}

/// Checks slope, convexity, jump, and first-variation behavior of a
/// profile whose concatenation has total exterior angle `ea_total`.
pub fn verify_derivative_bound(prof: &DistanceProfile, ea_total: f64) -> DerivativeReport {
    let mut max_abs_slope: f64 = 0.0;
    let mut argmax_slope = 0.0;
    for (&s, &fp) in prof.s.iter().zip(&prof.f_prime) {
        if fp.abs() > max_abs_slope {
            max_abs_slope = fp.abs();
            argmax_slope = s;
        }
    }
    let mut convex_ok = true;
    for (start, end) in prof.pieces() {
        for i in start + 1..end.saturating_sub(1) {
            let ds = prof.s[i + 1] - prof.s[i];
            let second = prof.f[i + 1] - 2.0 * prof.f[i] + prof.f[i - 1];
            if second < -(tol::TOL_CONV * ds * ds + 1e-12) {
                convex_ok = false;
            }
        }
    }
    let jump_ok = prof.jumps.iter().all(|j| j.abs() <= ea_total + tol::TOL_DERIV);
    DerivativeReport {
        max_abs_slope,
        argmax_slope,
        lipschitz_ok: max_abs_slope <= 1.0 + 1e-9,
        ea_bound_ok: max_abs_slope <= ea_total + tol::TOL_DERIV,
        convex_ok,
        jump_ok,
        first_variation_err: prof.fd_cross_check,
    }
}

/// True when every interior vertex of `c` projects to the interior of the
/// chord (expected in the small-angle regime; failure means the chord is
/// too short to shadow the vertex).
pub fn vertices_project_interior(c: &Concatenation, chord: &GeodesicSegment) -> bool {
    let vertices = c.vertices();
    vertices[1..vertices.len() - 1]
        .iter()
        .all(|v| project_to_segment(v, chord).interior)
}

/// For each interior vertex `r`, the polygon bounded by the chord from the
/// start of `c` to `r` and the subarc up to `r` has its angle at `r`
/// bounded by the exterior angles accumulated strictly before `r`. Returns
/// the worst excess `angle − budget` (≤ 0 when the bound holds).
pub fn polygon_angle_excess(c: &Concatenation) -> Result<f64> {
    let vertices = c.vertices();
    let angles = c.junction_angles()?;
    let segments = c.segments();
    let mut worst = f64::NEG_INFINITY;
    let mut budget = 0.0;
    for v in 1..vertices.len() - 1 {
        let chord = hyp::geodesic_between(&vertices[0], &vertices[v])?;
        let chord_back = chord.tangent_at(chord.length).reversed();
        let incoming_back = segments[v - 1].tangent_at(segments[v - 1].length).reversed();
        let angle = hyp::angle_between(&incoming_back, &chord_back)?;
        worst = worst.max(angle - budget);
        budget += angles[v - 1];
    }
    Ok(worst)
}

/// Configuration of the randomized shadowing experiment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShadowConfig {
    pub trials: u32,
    /// Cap on the total exterior angle of generated concatenations.
    pub ea_max: f64,
    /// Horoball level of the junction points, sampled uniformly.
    pub height_range: (f64, f64),
    /// Vertical tail length below the junctions, sampled uniformly.
    pub tail_range: (f64, f64),
    /// Largest twist exponent sampled.
    pub n_max: i64,
}

impl Default for ShadowConfig {
    fn default() -> Self {
        Self {
            trials: 200,
            ea_max: 0.1,
            height_range: (0.8, 1.5),
            tail_range: (1.0, 3.0),
            n_max: 4096,
        }
    }
}

impl ShadowConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ea_max > 0.0 && self.ea_max <= 0.5) {
            return Err(Error::Config {
                field: "ea_max".into(),
                reason: format!("must lie in (0, 1/2], got {}", self.ea_max),
            });
        }
        let (h0, h1) = self.height_range;
        if !(h0 > 0.0 && h1 >= h0 && h1.is_finite()) {
            return Err(Error::Config {
                field: "height_range".into(),
                reason: format!("invalid range ({h0}, {h1})"),
            });
        }
        let (t0, t1) = self.tail_range;
        if !(t0 > 0.0 && t1 >= t0 && t1.is_finite()) {
            return Err(Error::Config {
                field: "tail_range".into(),
                reason: format!("invalid range ({t0}, {t1})"),
            });
        }
        // The sampled twist range must be nonempty at the worst height.
        let n_min_worst = min_twist_for_budget(h1, self.ea_max);
        if self.n_max < n_min_worst + 8 {
            return Err(Error::Config {
                field: "n_max".into(),
                reason: format!(
                    "must be ≥ {} for heights up to {h1} under ea_max {}",
                    n_min_worst + 8,
                    self.ea_max
                ),
            });
        }
        Ok(())
    }
}

/// Smallest twist exponent keeping the total exterior angle at or under
/// `ea_max` at horoball level `h`, allowing the offset to shrink the
/// horizontal gap by up to 1.
fn min_twist_for_budget(h: f64, ea_max: f64) -> i64 {
    let delta_min = 2.0 * h / (0.5 * ea_max).tan();
    (delta_min + 1.0).ceil() as i64
}

/// One trial row of the shadowing experiment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShadowTrial {
    pub trial: u32,
    pub ea_total: f64,
    pub max_f: f64,
    pub bound: f64,
    pub pass: bool,
    /// Largest |F′| along the profile.
    pub max_abs_slope: f64,
    /// max |F′| ≤ ea_total + slope tolerance.
    pub deriv_pass: bool,
}

/// A trial whose construction failed; the batch continues without it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u32,
    pub error: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ShadowQuantiles {
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShadowReport {
    pub trials: Vec<ShadowTrial>,
    pub failures: Vec<TrialFailure>,
    /// Quantiles of max F / bound (1 would saturate the bound).
    pub ratio_quantiles: Option<ShadowQuantiles>,
    /// Least-squares slope of log max F against log ea.
    pub loglog_slope: Option<f64>,
    /// Every trial was built and stayed within the distance bound.
    pub all_pass: bool,
    /// Every trial satisfied the derivative bound.
    pub all_deriv_pass: bool,
}

/// Runs the randomized shadowing experiment: twisted concatenations with
/// sampled heights, offsets, twists, and tails, each measured against the
/// chord through its endpoints, the curvature bound, and the slope budget.
pub fn shadowing_experiment(cfg: &ShadowConfig, seed: u64) -> Result<ShadowReport> {
    cfg.validate()?;
    let outcomes: Vec<std::result::Result<ShadowTrial, TrialFailure>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            run_trial(cfg, seed, trial).map_err(|e| TrialFailure { trial, error: e.to_string() })
        })
        .collect();

    let mut trials = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(t) => trials.push(t),
            Err(f) => failures.push(f),
        }
    }

    let mut ratios: Vec<f64> = trials.iter().map(|t| t.max_f / t.bound).collect();
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let ratio_quantiles = if ratios.is_empty() {
        None
    } else {
        let quantile = |q: f64| ratios[((ratios.len() as f64 - 1.0) * q).round() as usize];
        Some(ShadowQuantiles {
            p50: quantile(0.5),
            p90: quantile(0.9),
            max: *ratios.last().unwrap(),
        })
    };

    let xs: Vec<f64> = trials.iter().map(|t| t.ea_total.ln()).collect();
    let ys: Vec<f64> = trials.iter().map(|t| t.max_f.max(1e-300).ln()).collect();
    let loglog_slope = if xs.len() < 2 {
        None
    } else {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        if var > 0.0 {
            Some(cov / var)
        } else {
            None
        }
    };

    let all_pass = failures.is_empty() && trials.iter().all(|t| t.pass);
    let all_deriv_pass = failures.is_empty() && trials.iter().all(|t| t.deriv_pass);
    Ok(ShadowReport { trials, failures, ratio_quantiles, loglog_slope, all_pass, all_deriv_pass })
}

fn run_trial(cfg: &ShadowConfig, seed: u64, trial: u32) -> Result<ShadowTrial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    let h = rng.gen_range(cfg.height_range.0..=cfg.height_range.1);
    let x1 = rng.gen_range(-0.5..0.5);
    let x2 = rng.gen_range(-0.5..0.5);
    let tail = rng.gen_range(cfg.tail_range.0..=cfg.tail_range.1);
    let n_min = min_twist_for_budget(h, cfg.ea_max);
    let n = rng.gen_range(n_min..=cfg.n_max);
    let p1 = HalfPlanePoint::new(x1, h)?;
    let p2 = HalfPlanePoint::new(x2, h)?;
    let (path, _chord) = twisted_path(&p1, &p2, n, tail)?;
    let ea_total = exterior_angle_total(&path)?;
    let gamma = Geodesic::through(&path.start(), &path.end())?;
    let prof = distance_profile(&path, &gamma, tol::PROFILE_SAMPLES_PER_UNIT);
    let report = verify_derivative_bound(&prof, ea_total);
    let (_s_star, max_f, _res) = max_distance_stabilized(&path, &gamma);
    let bound = bound_from_ea(ea_total, -1.0)?;
    Ok(ShadowTrial {
        trial,
        ea_total,
        max_f,
        bound,
        pass: max_f <= bound,
        max_abs_slope: report.max_abs_slope,
        deriv_pass: report.ea_bound_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::geodesic::flow;
    use crate::hyp::point::UnitTangent;
    use crate::twist::twist_concatenate;

    fn unit_i() -> HalfPlanePoint {
        HalfPlanePoint::new(0.0, 1.0).unwrap()
    }

    #[test]
    fn bound_vanishes_at_zero_and_grows() {
        assert_eq!(bound_from_ea(0.0, -1.0).unwrap(), 0.0);
        let mut prev = 0.0;
        for k in 1..=10 {
            let ea = 0.05 * k as f64;
            let b = bound_from_ea(ea, -1.0).unwrap();
            assert!(b > prev, "bound must increase in ea");
            prev = b;
        }
    }

    #[test]
    fn bound_scales_inversely_with_sqrt_curvature() {
        let b1 = bound_from_ea(0.1, -1.0).unwrap();
        let b4 = bound_from_ea(0.1, -4.0).unwrap();
        assert!((b4 - b1 / 2.0).abs() < 1e-14);
        assert!(b1 > 0.39 && b1 < 0.42, "B(0.1) = {b1}");
    }

    #[test]
    fn bound_domain_is_enforced() {
        assert!(matches!(bound_from_ea(0.6, -1.0), Err(Error::EaOutOfRange { .. })));
        assert!(matches!(bound_from_ea(-0.1, -1.0), Err(Error::EaOutOfRange { .. })));
        assert!(bound_from_ea(0.1, 0.0).is_err());
        assert!(bound_from_ea(0.1, 1.0).is_err());
    }

    #[test]
    fn profile_vanishes_at_both_ends() {
        let (path, _) = twisted_path(&unit_i(), &unit_i(), 16, 2.0).unwrap();
        let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
        let prof = distance_profile(&path, &gamma, 64);
        assert!(prof.f[0] < 1e-9);
        assert!(prof.f.last().unwrap() < &1e-9);
        assert_eq!(prof.piece_ends.len(), 3);
        assert_eq!(prof.jumps.len(), 2);
    }

    #[test]
    fn first_variation_matches_finite_differences() {
        let (path, _) = twisted_path(&unit_i(), &unit_i(), 32, 2.0).unwrap();
        let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
        let prof = distance_profile(&path, &gamma, 512);
        assert!(prof.fd_cross_check < 1e-3, "cross check {}", prof.fd_cross_check);
    }

    #[test]
    fn vertex_jumps_are_bounded_by_vertex_angles() {
        let (path, _) = twisted_path(&unit_i(), &unit_i(), 24, 2.0).unwrap();
        let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
        let prof = distance_profile(&path, &gamma, 256);
        let angles = path.junction_angles().unwrap();
        assert_eq!(prof.jumps.len(), angles.len());
        for (jump, angle) in prof.jumps.iter().zip(&angles) {
            assert!(jump.abs() <= angle + 1e-6, "jump {jump} exceeds vertex angle {angle}");
        }
    }

    #[test]
    fn max_matches_direct_minimization_oracle() {
        // Right-angle two-piece concatenation; its max distance to the
        // chord is recomputed by golden-section minimization in the chord
        // parameter, independent of the projection formulas.
        let a = unit_i();
        let b = HalfPlanePoint::new(0.0, 2.0).unwrap();
        let corner = UnitTangent::new(b, std::f64::consts::FRAC_PI_2);
        let c = flow(&corner, 0.7).base;
        let path = Concatenation::from_points(&[a, b, c]).unwrap();
        let gamma = Geodesic::through(&a, &c).unwrap();
        let (s_star, f_star) = max_distance(&path, &gamma, 512);
        let p_star = path.point_at(s_star);
        let sigma_a = gamma.sigma_of(&a);
        let sigma_c = gamma.sigma_of(&c);
        let (mut lo, mut hi) = (sigma_a.min(sigma_c) - 1.0, sigma_a.max(sigma_c) + 1.0);
        let eval = |sigma: f64| hyp::dist(&p_star, &gamma.point_at_sigma(sigma));
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        let (mut f1, mut f2) = (eval(x1), eval(x2));
        for _ in 0..200 {
            if f1 < f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = eval(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = eval(x2);
            }
        }
        let oracle = eval(0.5 * (lo + hi));
        assert!((f_star - oracle).abs() < 1e-6, "max {f_star} vs oracle {oracle}");
        assert!(f_star > 0.1, "right-angle corner must stand off the chord");
    }

    #[test]
    fn max_is_positive_and_bounded_for_twisted_paths() {
        for n in [16i64, 64, 256] {
            let (path, _) = twisted_path(&unit_i(), &unit_i(), n, 2.0).unwrap();
            let ea = exterior_angle_total(&path).unwrap();
            let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
            let (_, max_f, _) = max_distance_stabilized(&path, &gamma);
            let bound = bound_from_ea(ea, -1.0).unwrap();
            assert!(max_f > 0.0);
            assert!(max_f <= bound, "n = {n}: max F {max_f} vs bound {bound}");
        }
    }

    #[test]
    fn derivative_report_is_clean_on_a_twisted_path() {
        let (path, _) = twisted_path(&unit_i(), &unit_i(), 32, 2.0).unwrap();
        let ea = exterior_angle_total(&path).unwrap();
        let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
        let prof = distance_profile(&path, &gamma, 512);
        let report = verify_derivative_bound(&prof, ea);
        assert!(report.lipschitz_ok, "max slope {}", report.max_abs_slope);
        assert!(report.ea_bound_ok, "max slope {} vs ea {}", report.max_abs_slope, ea);
        assert!(report.convex_ok);
        assert!(report.jump_ok);
        assert!(
            report.first_variation_err < 1e-3,
            "first variation error {}",
            report.first_variation_err
        );
    }

    #[test]
    fn interior_vertices_project_inside_the_chord() {
        let (path, _) = twisted_path(&unit_i(), &unit_i(), 16, 2.0).unwrap();
        let chord = hyp::geodesic_between(&path.start(), &path.end()).unwrap();
        assert!(vertices_project_interior(&path, &chord));
    }

    #[test]
    fn polygon_angles_stay_within_accumulated_budget() {
        for n in [8i64, 32, 128] {
            let (path, _) = twisted_path(&unit_i(), &unit_i(), n, 2.0).unwrap();
            let excess = polygon_angle_excess(&path).unwrap();
            assert!(excess <= 1e-9, "n = {n}: excess {excess}");
        }
    }

    #[test]
    fn slope_of_straight_concatenation_is_zero() {
        let a = HalfPlanePoint::new(0.0, 1.0).unwrap();
        let b = HalfPlanePoint::new(0.0, 2.0).unwrap();
        let c = HalfPlanePoint::new(0.0, 4.0).unwrap();
        let path = Concatenation::from_points(&[a, b, c]).unwrap();
        let gamma = Geodesic::through(&path.start(), &path.end()).unwrap();
        let prof = distance_profile(&path, &gamma, 128);
        let report = verify_derivative_bound(&prof, 0.0);
        assert!(report.max_abs_slope < 1e-9);
        assert!(report.ea_bound_ok);
    }

    #[test]
    fn experiment_is_deterministic_and_passes() {
        let cfg = ShadowConfig { trials: 12, ..ShadowConfig::default() };
        let r1 = shadowing_experiment(&cfg, 42).unwrap();
        let r2 = shadowing_experiment(&cfg, 42).unwrap();
        assert!(r1.failures.is_empty());
        assert!(r1.all_pass);
        assert!(r1.all_deriv_pass);
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        let slope = r1.loglog_slope.unwrap();
        assert!(slope > 0.5 && slope < 1.5, "slope {slope}");
        assert!(r1.ratio_quantiles.unwrap().max <= 1.0);
        assert!(r1.trials.iter().all(|t| t.ea_total <= cfg.ea_max));
    }

    #[test]
    fn empty_family_gives_empty_report() {
        let cfg = ShadowConfig { trials: 0, ..ShadowConfig::default() };
        let r = shadowing_experiment(&cfg, 7).unwrap();
        assert!(r.trials.is_empty());
        assert!(r.failures.is_empty());
        assert!(r.ratio_quantiles.is_none());
        assert!(r.all_pass);
    }

    #[test]
    fn different_seeds_give_different_draws() {
        let cfg = ShadowConfig { trials: 6, ..ShadowConfig::default() };
        let r1 = shadowing_experiment(&cfg, 1).unwrap();
        let r2 = shadowing_experiment(&cfg, 2).unwrap();
        assert!(r1.trials.iter().zip(&r2.trials).any(|(a, b)| a.ea_total != b.ea_total));
    }

    #[test]
    fn config_validation_catches_bad_ranges() {
        let bad_ea = ShadowConfig { ea_max: 0.7, ..ShadowConfig::default() };
        assert!(bad_ea.validate().is_err());
        let bad_n = ShadowConfig { n_max: 4, ..ShadowConfig::default() };
        assert!(bad_n.validate().is_err());
        let bad_h = ShadowConfig { height_range: (0.0, 1.0), ..ShadowConfig::default() };
        assert!(bad_h.validate().is_err());
    }

    #[test]
    fn twist_budget_is_respected_at_the_minimum_twist() {
        for h in [0.8, 1.0, 1.5] {
            for ea_max in [0.1, 0.3, 0.5] {
                let n = min_twist_for_budget(h, ea_max);
                let p = HalfPlanePoint::new(0.5, h).unwrap();
                let q = HalfPlanePoint::new(-0.5, h).unwrap();
                let tc = twist_concatenate(&p, &q, n).unwrap();
                assert!(
                    tc.initial_gap + tc.terminal_gap <= ea_max + 1e-12,
                    "h = {h}, ea_max = {ea_max}"
                );
            }
        }
    }
}
