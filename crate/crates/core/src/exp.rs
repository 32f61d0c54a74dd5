//! Experiment drivers: deterministic, serializable runs of the library's
//! headline measurements, shared between the command-line binary and the
//! integration suites.
//!
//! Four studies live here. Oracle agreement replays random geodesic flows
//! through the adaptive integrator and the chord solver and measures both
//! against the closed-form half-plane geodesics. The twist study ladders
//! a chord across an increasingly twisted cusp excursion on both backends
//! and extracts the spiral statistics (shrinking junction gaps, linearly
//! growing length). The truncation study builds chained concatenations of
//! increasing depth from one plan and watches the chord tangents settle:
//! coverage of the unit tangent bundle grows, the full chord's tangent at
//! a fixed early anchor converges geometrically, and the nested-chord
//! family of the deepest chain certifies its own limit. The cusp-model
//! study checks the structural properties of the surrogate metric — unit
//! area form, curvature blow-up at the cusp, finite-time radial arrival
//! matched against quadrature, and the exact cusp-neighborhood area law.
//!
//! Randomized drivers take an explicit seed and give every case its own
//! counter-mode stream, so results are bitwise reproducible regardless of
//! worker count or scheduling order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dense::{
    build_concatenation, check_no_degeneration, chord_frames, chord_tangent_samples,
    chordal_limit, density_coverage, BuiltConcatenation, ConcatenationPlan,
};
use crate::error::{Error, Result};
use crate::hyp::{
    self, flow, project_to_geodesic, wrap_angle, HalfPlanePoint, UnitTangent,
};
use crate::metric::{
    chord_bvp, curvature_at, integrate_geodesic, metric_at, wp_radial_distance, ChartPoint,
    ChordOpts, IntOpts, MetricBackend, StopReason, WpParams,
};
use crate::quad;
use crate::spectrum::area::{
    cusp_area_divergence, fundamental_domain_area, CuspAreaRow, WP_MODULI_AREA_REPORTED,
};
use crate::twist::{
    twist_concatenate, twist_ladder_wp, twist_spiral_analysis, TwistRow, TwistSpiralStats,
};

/// Sampling box for the oracle-agreement cases: base heights stay well
/// clear of the real line so closed-form and integrated flows are both
/// comfortably conditioned, and lengths keep the runtime per case small.
const AGREE_X: (f64, f64) = (-2.0, 2.0);
const AGREE_Y: (f64, f64) = (0.3, 3.0);
const AGREE_LEN: (f64, f64) = (0.5, 4.0);

/// σ-resolution of the bundle tangent sampling; the coverage radius used
/// by the truncation study is two orders coarser.
const TANGENT_SPU: usize = 40;

/// One oracle-agreement case: a random unit tangent flowed for a random
/// arclength; errors of the integrated endpoint and of the two-point
/// solver against the closed form.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AgreementCase {
    pub case: u32,
    /// Distance from the integrated endpoint to the closed-form endpoint.
    pub flow_endpoint_err: f64,
    /// |dist(start, integrated endpoint) − requested length|.
    pub flow_length_err: f64,
    /// Angle gap between the integrated and closed-form end directions.
    pub flow_dir_err: f64,
    /// Distance from the solver's endpoint to the requested endpoint.
    pub chord_endpoint_err: f64,
    /// |solver path length − closed-form distance|.
    pub chord_length_err: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementReport {
    pub trials: u32,
    pub seed: u64,
    pub cases: Vec<AgreementCase>,
    pub max_flow_endpoint_err: f64,
    pub max_flow_length_err: f64,
    pub max_flow_dir_err: f64,
    pub max_chord_endpoint_err: f64,
    pub max_chord_length_err: f64,
}

/// Flows `trials` random unit tangents with the adaptive integrator and
/// re-solve each endpoint pair with the chord solver, measuring both
/// against the closed-form geodesics of the half-plane.
pub fn geodesic_agreement(trials: u32, seed: u64) -> Result<AgreementReport> {
    let cases: Result<Vec<AgreementCase>> = (0..trials)
        .into_par_iter()
        .map(|case| run_agreement_case(case, seed))
        .collect();
    let cases = cases?;
    let max = |f: fn(&AgreementCase) -> f64| cases.iter().map(f).fold(0.0, f64::max);
    Ok(AgreementReport {
        trials,
        seed,
        max_flow_endpoint_err: max(|c| c.flow_endpoint_err),
        max_flow_length_err: max(|c| c.flow_length_err),
        max_flow_dir_err: max(|c| c.flow_dir_err),
        max_chord_endpoint_err: max(|c| c.chord_endpoint_err),
        max_chord_length_err: max(|c| c.chord_length_err),
        cases,
    })
}

fn run_agreement_case(case: u32, seed: u64) -> Result<AgreementCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(case as u64 + 1);
    let x = rng.gen_range(AGREE_X.0..=AGREE_X.1);
    let y = rng.gen_range(AGREE_Y.0..=AGREE_Y.1);
    let dir = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    let len = rng.gen_range(AGREE_LEN.0..=AGREE_LEN.1);

    let start = HalfPlanePoint::new(x, y)?;
    let u = UnitTangent::new(start, dir);
    let exact_end = flow(&u, len);

    let backend = MetricBackend::Hyperbolic;
    let (vx, vy) = u.vector();
    let path = integrate_geodesic(
        &backend,
        ChartPoint::from_halfplane(start),
        [vx * y, vy * y],
        len,
        &IntOpts::default(),
    )?;
    let got = path.end().pos.to_halfplane()?;
    let got_dir = UnitTangent::from_vector(got, path.end().vel[0], path.end().vel[1])?;

    let chord = chord_bvp(
        &backend,
        ChartPoint::from_halfplane(start),
        ChartPoint::from_halfplane(exact_end.base),
        &ChordOpts::default(),
    )?;
    let chord_end = chord.end().pos.to_halfplane()?;

    Ok(AgreementCase {
        case,
        flow_endpoint_err: hyp::dist(&got, &exact_end.base),
        flow_length_err: (hyp::dist(&start, &got) - len).abs(),
        flow_dir_err: wrap_angle(got_dir.dir() - exact_end.dir()).abs(),
        chord_endpoint_err: hyp::dist(&chord_end, &exact_end.base),
        chord_length_err: (chord.length() - len).abs(),
    })
}

/// One rung of the closed-form twist ladder: measured junction gap
/// against the reference angle arctan(2/n) for unit-height junctions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwistGapRow {
    pub n: i64,
    pub gap: f64,
    pub reference: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwistReport {
    pub exact_rows: Vec<TwistGapRow>,
    pub exact_max_err: f64,
    pub wp_ell0: f64,
    pub wp_rows: Vec<TwistRow>,
    pub wp_stats: TwistSpiralStats,
}

/// Ladders the twisted chord on both backends: junction gaps against the
/// arctangent closed form on the half-plane for n ∈ 1..=`n_exact`, and
/// the cusp-model ladder with its spiral statistics for n ∈ 1..=`wp_n_max`
/// at level `ell0`.
pub fn twist_experiment(
    n_exact: i64,
    wp_n_max: i64,
    ell0: f64,
    params: &WpParams,
) -> Result<TwistReport> {
    if n_exact < 1 || wp_n_max < 2 {
        return Err(Error::Config {
            field: "n_exact/wp_n_max".into(),
            reason: format!("ladders need n_exact ≥ 1 and wp_n_max ≥ 2, got {n_exact}, {wp_n_max}"),
        });
    }
    let base = HalfPlanePoint::new(0.0, 1.0)?;
    let mut exact_rows = Vec::with_capacity(n_exact as usize);
    for n in 1..=n_exact {
        let tc = twist_concatenate(&base, &base, n)?;
        let reference = (2.0 / n as f64).atan();
        let gap = tc.initial_gap;
        exact_rows.push(TwistGapRow { n, gap, reference, abs_err: (gap - reference).abs() });
    }
    let exact_max_err = exact_rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);

    let ns: Vec<i64> = (1..=wp_n_max).collect();
    let wp_rows = twist_ladder_wp(params, ell0, &ns)?;
    let wp_stats = twist_spiral_analysis(&wp_rows)?;
    Ok(TwistReport { exact_rows, exact_max_err, wp_ell0: ell0, wp_rows, wp_stats })
}

/// A unit tangent in plain serializable coordinates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TangentSample {
    pub x: f64,
    pub y: f64,
    pub dir: f64,
}

impl From<UnitTangent> for TangentSample {
    fn from(t: UnitTangent) -> Self {
        Self { x: t.base.x(), y: t.base.y(), dir: t.dir() }
    }
}

/// Phase gap between two tangents in the same chart: base distance plus
/// wrapped direction difference.
fn tangent_gap(a: &UnitTangent, b: &UnitTangent) -> f64 {
    hyp::dist(&a.base, &b.base) + wrap_angle(a.dir() - b.dir()).abs()
}

/// Per-truncation measurements of the chained concatenation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseRow {
    pub n: usize,
    /// Fraction of bundle grid cells within `eps` of a folded chord tangent.
    pub coverage: f64,
    pub tangent_count: usize,
    pub ea_total: f64,
    pub total_length: f64,
    pub degeneration_pass: bool,
    /// Full-chord tangent at the shared early-frame anchor.
    pub anchor: TangentSample,
}

/// The nested-chord family of the deepest truncation, innermost first.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NestedChordSummary {
    /// Bodies spanned by each chord.
    pub spans: Vec<usize>,
    pub cauchy_gaps: Vec<f64>,
    pub max_f: Vec<f64>,
    pub terminal_max_f: Vec<f64>,
    pub tv_all_ok: bool,
    pub deriv_all_ok: bool,
    pub limit: Option<TangentSample>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseReport {
    pub plan_len: usize,
    pub seed: u64,
    pub eps: f64,
    pub rows: Vec<DenseRow>,
    /// Anchor-tangent gaps between successive truncations.
    pub anchor_gaps: Vec<f64>,
    pub nested: NestedChordSummary,
}

/// Builds one plan of `plan_len` generators and measures each requested
/// truncation: bundle coverage of the folded chord tangents at radius
/// `eps`, non-degeneration, and the full chord's tangent at a common
/// early anchor. The deepest truncation also runs its nested-chord
/// family, centered on its middle body.
pub fn dense_truncation_experiment(
    plan_len: usize,
    truncations: &[usize],
    eps: f64,
    seed: u64,
) -> Result<DenseReport> {
    if truncations.is_empty() {
        return Err(Error::Config {
            field: "truncations".into(),
            reason: "need at least one truncation depth".into(),
        });
    }
    if truncations.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config {
            field: "truncations".into(),
            reason: "truncation depths must strictly increase".into(),
        });
    }
    let deepest = *truncations.last().expect("non-empty");
    if deepest > plan_len || truncations[0] < 2 {
        return Err(Error::Config {
            field: "truncations".into(),
            reason: format!("depths must lie in 2..={plan_len}"),
        });
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::Config {
            field: "eps".into(),
            reason: format!("coverage radius must be positive, got {eps}"),
        });
    }

    let plan = ConcatenationPlan::standard(plan_len, seed)?;
    let chains: Result<Vec<BuiltConcatenation>> = truncations
        .par_iter()
        .map(|&n| build_concatenation(&plan, n))
        .collect();
    let chains = chains?;

    let anchors = anchored_tangents(&chains)?;
    let mut rows = Vec::with_capacity(chains.len());
    for ((&n, c), anchor) in truncations.iter().zip(&chains).zip(&anchors) {
        let tangents = chord_tangent_samples(c, TANGENT_SPU)?;
        let coverage = density_coverage(&tangents, eps);
        let degen = check_no_degeneration(c)?;
        rows.push(DenseRow {
            n,
            coverage,
            tangent_count: tangents.len(),
            ea_total: c.ea_total(),
            total_length: c.total_length(),
            degeneration_pass: degen.pass,
            anchor: (*anchor).into(),
        });
    }
    let anchor_gaps = anchors.windows(2).map(|w| tangent_gap(&w[0], &w[1])).collect();

    let last = chains.last().expect("non-empty");
    let nested = nested_summary(last)?;

    Ok(DenseReport { plan_len, seed, eps, rows, anchor_gaps, nested })
}

/// Tangent of each chain's full chord at a common anchor: the midpoint of
/// the earliest body whose frame renders the chord in every chain. Since
/// truncations of one plan share their initial bodies and frames, these
/// tangents live in one chart and are directly comparable.
fn anchored_tangents(chains: &[BuiltConcatenation]) -> Result<Vec<UnitTangent>> {
    let frames: Result<Vec<_>> =
        chains.iter().map(|c| chord_frames(c, 0, c.bodies() - 1)).collect();
    let frames = frames?;
    let min_bodies = chains.iter().map(|c| c.bodies()).min().expect("non-empty");
    let f = (0..min_bodies)
        .find(|&f| frames.iter().all(|ch| ch.in_frame(f).complete.is_some()))
        .ok_or_else(|| Error::InsufficientData {
            reason: "no common frame renders every truncation's chord".into(),
        })?;
    let mut out = Vec::with_capacity(chains.len());
    for (c, ch) in chains.iter().zip(&frames) {
        let complete = ch.in_frame(f).complete.as_ref().expect("frame chosen renderable");
        let anchor = &c.midpoints()[f].point;
        let sigma = complete.geo.sigma_of(&project_to_geodesic(anchor, &complete.geo).foot);
        out.push(complete.geo.tangent_at_sigma(sigma, complete.forward()));
    }
    Ok(out)
}

/// Runs the nested-chord family of one chain, centered on its middle
/// body, and flattens the per-chord statistics.
fn nested_summary(c: &BuiltConcatenation) -> Result<NestedChordSummary> {
    let m = (c.bodies() - 1) / 2;
    let radius = m.min(c.bodies() - 1 - m);
    let mut vertices = Vec::with_capacity(2 * radius);
    for k in 1..=radius {
        vertices.push(m - k);
        vertices.push(m + k);
    }
    let lim = chordal_limit(c, &vertices)?;
    Ok(NestedChordSummary {
        spans: lim.stats.iter().map(|s| s.r - s.l + 1).collect(),
        cauchy_gaps: lim.cauchy_gaps.clone(),
        max_f: lim.stats.iter().map(|s| s.max_f).collect(),
        terminal_max_f: lim.stats.iter().map(|s| s.terminal_max_f).collect(),
        tv_all_ok: lim.stats.iter().all(|s| s.tv_ok),
        deriv_all_ok: lim.stats.iter().all(|s| s.deriv.ea_bound_ok),
        limit: lim.limit_tangent.map(Into::into),
    })
}

/// One rung of the curvature ladder toward the cusp.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CurvatureSample {
    pub ell: f64,
    pub curvature: f64,
}

/// Radial-arrival check: the integrated arclength from `ell0` down to the
/// stop level against an independent quadrature of the radial element.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RadialCheck {
    pub ell0: f64,
    pub stop_level: f64,
    /// Level the integrator actually stopped at.
    pub ell_end: f64,
    pub stopped_at_cusp: bool,
    pub ode_len: f64,
    pub quad_len: f64,
    pub abs_err: f64,
    /// Closed-form distance-to-cusp difference, for reference.
    pub closed_form_len: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WpModelReport {
    /// Largest |det g − 1/4| over the sample grid.
    pub det_max_dev: f64,
    pub det_samples: usize,
    pub curvature_ladder: Vec<CurvatureSample>,
    pub min_curvature: f64,
    /// Curvature dropped below −10³ somewhere on the ladder.
    pub curvature_blowup_reached: bool,
    pub radial: RadialCheck,
    pub area_eps: f64,
    pub area_rows: Vec<CuspAreaRow>,
    /// Quadrature of the modular fundamental-domain area (target π/3).
    pub fundamental_domain_area: f64,
    pub fundamental_domain_err: f64,
    /// Carried literature value for the true moduli-space area; reported
    /// verbatim, never computed, because the surrogate metric does not
    /// reproduce it.
    pub moduli_area_reported: f64,
}

/// Structural checks of the cusp-model metric: area form, curvature
/// blow-up, finite-time radial arrival against quadrature, the exact
/// linear cusp-neighborhood area law, and the half-plane fundamental
/// domain area by quadrature.
pub fn wp_model_checks(params: &WpParams) -> Result<WpModelReport> {
    params.validate()?;
    let backend = MetricBackend::WeilPetersson(*params);

    let mut det_max_dev: f64 = 0.0;
    let mut det_samples = 0usize;
    let n_ell = 60;
    for i in 0..n_ell {
        let ell = params.ell_max * 1e-6_f64.powf(1.0 - i as f64 / (n_ell - 1) as f64);
        for j in 0..21 {
            let tau = -5.0 + 0.5 * j as f64;
            let g = metric_at(&backend, ChartPoint::new(ell, tau))?;
            det_max_dev = det_max_dev.max((g.det() - 0.25).abs());
            det_samples += 1;
        }
    }

    let mut curvature_ladder = Vec::new();
    let mut min_curvature = f64::INFINITY;
    for k in 0..=40 {
        let ell = params.ell_max * 0.5_f64.powi(k);
        let curvature = curvature_at(&backend, ChartPoint::new(ell, 0.0))?;
        min_curvature = min_curvature.min(curvature);
        curvature_ladder.push(CurvatureSample { ell, curvature });
    }
    let curvature_blowup_reached = min_curvature < -1e3;

    let ell0 = 0.5 * params.ell_max;
    let stop_level = 1e-6 * ell0;
    let budget = 2.0 * wp_radial_distance(params, ell0);
    let opts = IntOpts { cusp_stop: Some(stop_level), ..IntOpts::default() };
    let path =
        integrate_geodesic(&backend, ChartPoint::new(ell0, 0.0), [-1.0, 0.0], budget, &opts)?;
    let stopped_at_cusp = path.stop == Some(StopReason::CuspStop);
    let ell_end = path.end().pos.c1;
    let ode_len = path.length();
    // Quadrature of the radial length element √g₁₁ dℓ under ℓ = ℓ₀·v⁴,
    // which removes the cusp singularity for exponents below 2.
    let quad_len = quad::integrate(
        |v| {
            let ell = ell0 * v.powi(4);
            let g11 = metric_at(&backend, ChartPoint::new(ell, 0.0))
                .map(|g| g.g11)
                .unwrap_or(f64::NAN);
            g11.sqrt() * 4.0 * ell0 * v.powi(3)
        },
        (ell_end / ell0).powf(0.25),
        1.0,
        160,
    );
    let radial = RadialCheck {
        ell0,
        stop_level,
        ell_end,
        stopped_at_cusp,
        ode_len,
        quad_len,
        abs_err: (ode_len - quad_len).abs(),
        closed_form_len: wp_radial_distance(params, ell0) - wp_radial_distance(params, ell_end),
    };

    let area_eps = (0.5_f64).min(params.ell_max);
    let area_rows = cusp_area_divergence(area_eps, &[10.0, 20.0, 40.0, 80.0], params)?;

    let fd_area = fundamental_domain_area(200);
    let fd_err = (fd_area - std::f64::consts::PI / 3.0).abs();

    Ok(WpModelReport {
        det_max_dev,
        det_samples,
        curvature_ladder,
        min_curvature,
        curvature_blowup_reached,
        radial,
        area_eps,
        area_rows,
        fundamental_domain_area: fd_area,
        fundamental_domain_err: fd_err,
        moduli_area_reported: WP_MODULI_AREA_REPORTED,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_cases_stay_within_solver_tolerances() {
        let report = geodesic_agreement(40, 11).unwrap();
        assert_eq!(report.cases.len(), 40);
        assert!(report.max_flow_endpoint_err < 1e-6, "{}", report.max_flow_endpoint_err);
        assert!(report.max_flow_length_err < 1e-6, "{}", report.max_flow_length_err);
        assert!(report.max_chord_endpoint_err < 1e-6, "{}", report.max_chord_endpoint_err);
        assert!(report.max_chord_length_err < 1e-6, "{}", report.max_chord_length_err);
    }

    #[test]
    fn agreement_is_deterministic_per_seed() {
        let a = geodesic_agreement(8, 3).unwrap();
        let b = geodesic_agreement(8, 3).unwrap();
        let ja = serde_json::to_string(&a).unwrap();
        let jb = serde_json::to_string(&b).unwrap();
        assert_eq!(ja, jb);
        let c = geodesic_agreement(8, 4).unwrap();
        assert_ne!(ja, serde_json::to_string(&c).unwrap());
    }

    #[test]
    fn twist_gaps_match_the_arctangent_on_unit_height() {
        let report =
            twist_experiment(16, 24, 1.0, &WpParams::default()).unwrap();
        assert!(report.exact_max_err < 1e-9, "{}", report.exact_max_err);
        for w in report.exact_rows.windows(2) {
            assert!(w[1].gap < w[0].gap);
        }
        assert!(report.wp_stats.gaps_decreasing);
        assert!(report.wp_stats.lengths_increasing);
        assert!(report.wp_stats.length_rate > 0.0);
    }

    #[test]
    fn wp_model_report_hits_its_structural_targets() {
        let report = wp_model_checks(&WpParams::default()).unwrap();
        assert!(report.det_max_dev < 1e-12, "{}", report.det_max_dev);
        assert!(report.curvature_blowup_reached);
        assert!(report.radial.stopped_at_cusp);
        assert!(report.radial.abs_err < 1e-4, "{}", report.radial.abs_err);
        assert!(report.fundamental_domain_err < 1e-6, "{}", report.fundamental_domain_err);
        for row in &report.area_rows {
            assert_eq!(row.strip_area, report.area_eps * row.t);
        }
    }

    #[test]
    fn truncation_depths_must_increase_and_fit_the_plan() {
        assert!(dense_truncation_experiment(6, &[], 0.3, 1).is_err());
        assert!(dense_truncation_experiment(6, &[4, 4], 0.3, 1).is_err());
        assert!(dense_truncation_experiment(6, &[4, 8], 0.3, 1).is_err());
        assert!(dense_truncation_experiment(6, &[2, 4], 0.0, 1).is_err());
    }
}
