//! Two-point geodesic (chord) solving on either backend.
//!
//! On the half-plane backend chords are closed-form. On the cusp model the
//! solver is a single-shooting method — secant iteration on the launch
//! frame angle, driving the signed transverse miss at closest approach to
//! zero — seeded and cross-checked by an independent discrete-geodesic
//! relaxation: the chart segment between the endpoints is subdivided into
//! a polyline whose interior nodes are Gauss–Seidel-relaxed to satisfy the
//! discrete geodesic equation, and two resolutions are Richardson-combined
//! into a length estimate. A shooting result that converges to an endpoint
//! but disagrees with the relaxation length found a different geodesic
//! branch and is rejected rather than returned.

use crate::error::{Error, Result};
use crate::hyp;
use crate::metric::integrate::{integrate_geodesic, GeodesicPath, IntOpts, PathSample};
use crate::metric::{
    frame_angle_to_vec, geodesic_accel, metric_at, vec_to_frame_angle, ChartPoint, MetricBackend,
};
use crate::tol;

/// Options for [`chord_bvp`].
#[derive(Debug, Clone, Copy)]
pub struct ChordOpts {
    /// Secant iteration cap.
    pub max_iter: u32,
    /// Nodes of the coarse relaxation polyline (the fine pass doubles it).
    pub relax_nodes: usize,
    /// Integration step cap for shooting probes and the returned path.
    pub h_max: f64,
}

impl Default for ChordOpts {
    fn default() -> Self {
        Self { max_iter: 60, relax_nodes: 64, h_max: tol::ODE_STEP_MAX }
    }
}

/// Distance between nearby chart points measured in the metric at their
/// chart midpoint; second-order accurate in the separation.
fn local_dist(backend: &MetricBackend, a: ChartPoint, b: ChartPoint) -> f64 {
    let mid = ChartPoint::new(0.5 * (a.c1 + b.c1), 0.5 * (a.c2 + b.c2));
    match metric_at(backend, mid) {
        Ok(g) => g.norm([b.c1 - a.c1, b.c2 - a.c2]),
        Err(_) => f64::INFINITY,
    }
}

/// Connecting geodesic from `p` to `q`, as a sampled path. The endpoint is
/// met within [`tol::TOL_BVP`] in the metric at `q`.
pub fn chord_bvp(
    backend: &MetricBackend,
    p: ChartPoint,
    q: ChartPoint,
    opts: &ChordOpts,
) -> Result<GeodesicPath> {
    metric_at(backend, p)?;
    metric_at(backend, q)?;
    if p.c1 == q.c1 && p.c2 == q.c2 {
        return Err(Error::DegenerateChord);
    }
    match backend {
        MetricBackend::Hyperbolic => hyperbolic_chord(p, q, opts),
        MetricBackend::WeilPetersson(_) => wp_chord(backend, p, q, opts),
    }
}

/// Closed-form chord on the half-plane, sampled at the step cap.
fn hyperbolic_chord(p: ChartPoint, q: ChartPoint, opts: &ChordOpts) -> Result<GeodesicPath> {
    let hp = p.to_halfplane()?;
    let hq = q.to_halfplane()?;
    let seg = hyp::geodesic_between(&hp, &hq)?;
    let len = seg.length;
    let n = (len / opts.h_max).ceil().max(1.0) as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let s = len * i as f64 / n as f64;
        let pt = seg.point_at(s);
        let tg = seg.tangent_at(s);
        let (vx, vy) = tg.vector();
        samples.push(PathSample {
            s,
            pos: ChartPoint::from_halfplane(pt),
            vel: [vx * pt.y(), vy * pt.y()],
        });
    }
    Ok(GeodesicPath { backend: MetricBackend::Hyperbolic, samples, stop: None })
}

/// Discrete-geodesic relaxation: returns the relaxed interior polyline and
/// its length, for `k` segments between fixed endpoints.
fn relax_polyline(
    backend: &MetricBackend,
    p: ChartPoint,
    q: ChartPoint,
    k: usize,
) -> Result<Vec<ChartPoint>> {
    let mut nodes: Vec<ChartPoint> = (0..=k)
        .map(|i| {
            let t = i as f64 / k as f64;
            ChartPoint::new(p.c1 + t * (q.c1 - p.c1), p.c2 + t * (q.c2 - p.c2))
        })
        .collect();
    let floor = 1e-9;
    let max_sweeps = 40_000;
    let target = 1e-12;
    // Successive over-relaxation at the 1-D Laplacian's optimal factor;
    // the geodesic system is a mild nonlinear perturbation of it.
    let omega = (2.0 / (1.0 + (std::f64::consts::PI / k as f64).sin())).min(1.9);
    for sweep in 0..max_sweeps {
        let mut max_move: f64 = 0.0;
        for i in 1..k {
            let prev = nodes[i - 1];
            let next = nodes[i + 1];
            let cur = nodes[i];
            let h = 1.0 / k as f64;
            let v = [
                (next.c1 - prev.c1) / (2.0 * h),
                (next.c2 - prev.c2) / (2.0 * h),
            ];
            let a = geodesic_accel(backend, cur, v);
            let gs1 = 0.5 * (next.c1 + prev.c1) - 0.5 * h * h * a[0];
            let gs2 = 0.5 * (next.c2 + prev.c2) - 0.5 * h * h * a[1];
            let mut z1 = cur.c1 + omega * (gs1 - cur.c1);
            let z2 = cur.c2 + omega * (gs2 - cur.c2);
            if matches!(backend, MetricBackend::WeilPetersson(_)) && z1 < floor {
                z1 = floor;
            }
            if !(z1.is_finite() && z2.is_finite()) {
                return Err(Error::NoConvergence { endpoint_error: f64::NAN, iterations: sweep });
            }
            max_move = max_move.max((z1 - cur.c1).abs().max((z2 - cur.c2).abs()));
            nodes[i] = ChartPoint::new(z1, z2);
        }
        if max_move < target {
            break;
        }
    }
    if matches!(backend, MetricBackend::WeilPetersson(_))
        && nodes[1..k].iter().any(|z| z.c1 <= floor)
    {
        return Err(Error::CuspObstruction);
    }
    Ok(nodes)
}

fn polyline_length(backend: &MetricBackend, nodes: &[ChartPoint]) -> f64 {
    nodes.windows(2).map(|w| local_dist(backend, w[0], w[1])).sum()
}

/// Closest approach of `path` to `q`: `(s*, distance)` by sampling plus
/// golden-section refinement of the local-metric distance.
fn closest_approach(path: &GeodesicPath, q: ChartPoint) -> (f64, f64) {
    let backend = path.backend;
    let d_at = |s: f64| local_dist(&backend, path.at(s).0, q);
    let (mut best_s, mut best_d) = (0.0, d_at(0.0));
    let total = path.end().s;
    let coarse = 4 * path.samples.len();
    for i in 0..=coarse {
        let s = total * i as f64 / coarse as f64;
        let d = d_at(s);
        if d < best_d {
            best_d = d;
            best_s = s;
        }
    }
    let span = total / coarse as f64;
    let (mut lo, mut hi) = ((best_s - span).max(0.0), (best_s + span).min(total));
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut fa, mut fb) = (d_at(a), d_at(b));
    for _ in 0..80 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = d_at(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = d_at(b);
        }
        if hi - lo < 1e-13 * total.max(1.0) {
            break;
        }
    }
    let s_star = 0.5 * (lo + hi);
    (s_star, d_at(s_star))
}

/// Signed transverse miss of `path` against target `q` at closest approach:
/// magnitude is the local distance, sign is the side of the path `q` lies
/// on (frame components).
fn signed_miss(path: &GeodesicPath, q: ChartPoint) -> (f64, f64, f64) {
    let (s_star, d) = closest_approach(path, q);
    let (pos, vel) = path.at(s_star);
    let g = match metric_at(&path.backend, pos) {
        Ok(g) => g,
        Err(_) => return (s_star, d, d),
    };
    let vf = [vel[0] * g.g11.sqrt(), vel[1] * g.g22.sqrt()];
    let df = [(q.c1 - pos.c1) * g.g11.sqrt(), (q.c2 - pos.c2) * g.g22.sqrt()];
    let cross = vf[0] * df[1] - vf[1] * df[0];
    (s_star, d, if cross >= 0.0 { d } else { -d })
}

/// Outcome of one shooting probe.
#[derive(Clone, Copy)]
struct Probe {
    s_star: f64,
    dist: f64,
    miss: f64,
    cusp_stopped: bool,
}

fn wp_chord(
    backend: &MetricBackend,
    p: ChartPoint,
    q: ChartPoint,
    opts: &ChordOpts,
) -> Result<GeodesicPath> {
    let coarse = relax_polyline(backend, p, q, opts.relax_nodes)?;
    let fine = relax_polyline(backend, p, q, 2 * opts.relax_nodes)?;
    let len_coarse = polyline_length(backend, &coarse);
    let len_fine = polyline_length(backend, &fine);
    let len_rich = len_fine + (len_fine - len_coarse) / 3.0;
    let len_err = (len_fine - len_coarse).abs() / 3.0;

    let theta0 = vec_to_frame_angle(backend, p, [fine[1].c1 - p.c1, fine[1].c2 - p.c2])?;
    // Probes truncate harmlessly near the cusp instead of failing there.
    let int_opts =
        IntOpts { h_max: opts.h_max, cusp_stop: Some(1e-11), ..IntOpts::default() };
    let cap = 1.5 * len_rich + 1.0;

    let probe = |theta: f64| -> Option<Probe> {
        let v0 = frame_angle_to_vec(backend, p, theta).ok()?;
        let path = integrate_geodesic(backend, p, v0, cap, &int_opts).ok()?;
        let (s_star, dist, miss) = signed_miss(&path, q);
        let cusp_stopped =
            matches!(path.stop, Some(crate::metric::integrate::StopReason::CuspStop));
        Some(Probe { s_star, dist, miss, cusp_stopped })
    };

    let mut best: Option<(f64, f64)> = None; // (theta, s_star)
    let mut iterations = 0u32;
    let mut best_dist = f64::INFINITY;

    // Secant on the launch angle, seeded by the relaxation direction.
    let mut t_prev = theta0;
    let mut m_prev = probe(t_prev);
    if let Some(pr) = m_prev {
        best_dist = pr.dist;
        if pr.dist < tol::TOL_BVP {
            best = Some((t_prev, pr.s_star));
        }
    }
    let mut t_cur = theta0 + 1e-4;
    let mut m_cur = probe(t_cur);
    while best.is_none() && iterations < opts.max_iter {
        iterations += 1;
        let (Some(prev), Some(cur)) = (m_prev, m_cur) else { break };
        best_dist = best_dist.min(cur.dist);
        if cur.dist < tol::TOL_BVP {
            best = Some((t_cur, cur.s_star));
            break;
        }
        let denom = cur.miss - prev.miss;
        if denom.abs() < 1e-300 {
            break;
        }
        let mut t_next = t_cur - cur.miss * (t_cur - t_prev) / denom;
        if !t_next.is_finite() {
            t_next = 0.5 * (t_prev + t_cur);
        }
        t_prev = t_cur;
        m_prev = m_cur;
        t_cur = t_next;
        m_cur = probe(t_cur);
    }

    if best.is_none() {
        // Bracket scan around the seed, then bisection on the sign change.
        let span = 0.5 * std::f64::consts::PI;
        let nscan = 64;
        let mut prev: Option<(f64, f64)> = None;
        let mut bracket = None;
        let mut all_cusp = true;
        for i in 0..=nscan {
            let th = theta0 - span + 2.0 * span * i as f64 / nscan as f64;
            let Some(pr) = probe(th) else {
                prev = None;
                continue;
            };
            best_dist = best_dist.min(pr.dist);
            if !pr.cusp_stopped || pr.dist < 1.0 {
                all_cusp = false;
            }
            if pr.dist < tol::TOL_BVP {
                best = Some((th, pr.s_star));
                break;
            }
            if let Some((pth, pmiss)) = prev {
                if pmiss.signum() != pr.miss.signum() {
                    bracket = Some((pth, th));
                    break;
                }
            }
            prev = Some((th, pr.miss));
        }
        if best.is_none() {
            if all_cusp {
                return Err(Error::CuspObstruction);
            }
            let Some((mut lo, mut hi)) = bracket else {
                return Err(Error::NoConvergence { endpoint_error: best_dist, iterations });
            };
            let Some(mut lo_probe) = probe(lo) else {
                return Err(Error::NoConvergence { endpoint_error: best_dist, iterations });
            };
            for _ in 0..200 {
                iterations += 1;
                let mid = 0.5 * (lo + hi);
                let Some(pm) = probe(mid) else {
                    return Err(Error::NoConvergence { endpoint_error: best_dist, iterations });
                };
                best_dist = best_dist.min(pm.dist);
                if pm.dist < tol::TOL_BVP {
                    best = Some((mid, pm.s_star));
                    break;
                }
                if pm.miss.signum() == lo_probe.miss.signum() {
                    lo = mid;
                    lo_probe = pm;
                } else {
                    hi = mid;
                }
            }
        }
    }

    let Some((theta, s_star)) = best else {
        return Err(Error::NoConvergence { endpoint_error: best_dist, iterations });
    };

    // Final pass: integrate exactly to the closest approach.
    let v0 = frame_angle_to_vec(backend, p, theta)?;
    let final_path = integrate_geodesic(backend, p, v0, s_star, &int_opts)?;
    let endpoint_error = local_dist(backend, final_path.end().pos, q);
    if endpoint_error >= tol::TOL_BVP {
        return Err(Error::NoConvergence { endpoint_error, iterations });
    }

    // Branch check against the relaxation length.
    let len = final_path.length();
    let allowed = (8.0 * len_err).max(1e-4 * len_rich.max(1.0));
    if (len - len_rich).abs() > allowed {
        return Err(Error::NoConvergence { endpoint_error: (len - len_rich).abs(), iterations });
    }
    Ok(final_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{wp_radial_distance, WpParams};

    const WP: MetricBackend = MetricBackend::WeilPetersson(WpParams {
        exponent: 1.5,
        ell_ref: 1.0,
        ell_max: 4.0,
    });

    #[test]
    fn hyperbolic_chord_matches_closed_form_distance() {
        let p = ChartPoint::new(0.0, 1.0);
        let q = ChartPoint::new(3.0, 2.0);
        let path = chord_bvp(&MetricBackend::Hyperbolic, p, q, &ChordOpts::default()).unwrap();
        let exact = hyp::dist(&p.to_halfplane().unwrap(), &q.to_halfplane().unwrap());
        assert!((path.length() - exact).abs() < 1e-10);
        let end = path.end().pos;
        assert!(local_dist(&MetricBackend::Hyperbolic, end, q) < 1e-10);
    }

    #[test]
    fn hyperbolic_chord_samples_lie_on_the_connecting_geodesic() {
        let p = ChartPoint::new(-1.0, 0.5);
        let q = ChartPoint::new(4.0, 3.0);
        let path = chord_bvp(&MetricBackend::Hyperbolic, p, q, &ChordOpts::default()).unwrap();
        let g = hyp::Geodesic::through(&p.to_halfplane().unwrap(), &q.to_halfplane().unwrap())
            .unwrap();
        for smp in &path.samples {
            assert!(g.dist_to(&smp.pos.to_halfplane().unwrap()) < 1e-9);
        }
    }

    #[test]
    fn wp_radial_chord_has_closed_form_length() {
        let w = WpParams::default();
        let p = ChartPoint::new(1.0, 0.0);
        let q = ChartPoint::new(0.0625, 0.0);
        let path = chord_bvp(&WP, p, q, &ChordOpts::default()).unwrap();
        let exact = wp_radial_distance(&w, 1.0) - wp_radial_distance(&w, 0.0625);
        assert!(
            (path.length() - exact).abs() < 1e-6,
            "length {} vs exact {}",
            path.length(),
            exact
        );
        assert!(local_dist(&WP, path.end().pos, q) < tol::TOL_BVP);
    }

    #[test]
    fn wp_chord_is_reversal_symmetric() {
        let p = ChartPoint::new(1.0, -0.5);
        let q = ChartPoint::new(1.0, 0.5);
        let fwd = chord_bvp(&WP, p, q, &ChordOpts::default()).unwrap();
        let rev = chord_bvp(&WP, q, p, &ChordOpts::default()).unwrap();
        assert!((fwd.length() - rev.length()).abs() < 1e-7);
    }

    #[test]
    fn wp_twist_chord_dips_inward_and_conserves_clairaut() {
        let p = ChartPoint::new(1.0, -1.0);
        let q = ChartPoint::new(1.0, 1.0);
        let path = chord_bvp(&WP, p, q, &ChordOpts::default()).unwrap();
        let min_ell = path.samples.iter().map(|s| s.pos.c1).fold(f64::INFINITY, f64::min);
        assert!(min_ell < 1.0, "chord must dip toward the cusp, min ell = {min_ell}");
        let j0 = metric_at(&WP, path.start().pos).unwrap().g22 * path.start().vel[1];
        for smp in &path.samples {
            let j = metric_at(&WP, smp.pos).unwrap().g22 * smp.vel[1];
            assert!((j - j0).abs() < 1e-7, "Clairaut drift at s = {}", smp.s);
        }
        let apex = path.samples.iter().fold((f64::INFINITY, 0.0), |acc, s| {
            if s.pos.c1 < acc.0 {
                (s.pos.c1, s.pos.c2)
            } else {
                acc
            }
        });
        assert!(apex.1.abs() < 0.05, "apex should sit near tau = 0 by symmetry");
    }

    #[test]
    fn wp_chord_between_different_levels() {
        let p = ChartPoint::new(0.5, 0.0);
        let q = ChartPoint::new(2.0, 0.8);
        let path = chord_bvp(&WP, p, q, &ChordOpts::default()).unwrap();
        assert!(local_dist(&WP, path.end().pos, q) < tol::TOL_BVP);
        let d_direct = local_dist(&WP, p, q);
        assert!(path.length() < 2.0 * d_direct.max(1.0));
    }

    #[test]
    fn degenerate_chord_is_rejected() {
        let p = ChartPoint::new(1.0, 0.3);
        assert!(matches!(
            chord_bvp(&WP, p, p, &ChordOpts::default()),
            Err(Error::DegenerateChord)
        ));
    }
}
