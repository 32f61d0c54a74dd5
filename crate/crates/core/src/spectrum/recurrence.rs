//! Monte Carlo recurrence of the geodesic flow.
//!
//! On the finite-area quotient, almost every unit tangent returns
//! arbitrarily close to itself; the experiment measures how fast. Each
//! trial draws a tangent from the Liouville measure restricted to the
//! fundamental domain (base from dx·dy/y², direction uniform), flows it
//! in closed form with a fundamental-domain reduction after every step,
//! and records the first time its footpoint re-enters the δ-ball on the
//! surface around the starting footpoint after having left it. The ball
//! constrains position only: at practical horizons the positional
//! return statistics are the measurable signal (a full phase-space ball
//! of the same radius has mean return time far beyond the horizons the
//! experiments run).
//!
//! The closed-orbit oracle is the exception: it checks direction too.
//! The quotient is a (2, 3, ∞) orbifold and the shortest closed geodesic
//! is reversed by the order-2 symmetry, so its footpoint curve revisits
//! the basepoint early — from the cone point itself at half the period,
//! and from a basepoint at parameter t₀ along the loop after L − 2·t₀ —
//! with the wrong direction each time. A phase ball (footpoint distance
//! plus direction gap) ignores those reflected passes and fires at the
//! true period, provided the basepoint sits away from the cone point,
//! where the reduction's choice of stabilizer word would make the
//! reported direction ambiguous.
//!
//! Detection runs on a fixed grid of step δ/2 capped at 0.05, then
//! refines the first re-entry to the local closest pass on a 64-fold
//! finer grid, so a closed orbit reports its period to a few parts in
//! 10⁴.
//!
//! The cusp-model backend flows in its chart instead (no quotient, so
//! no reduction): the ball uses the metric tensor at the start point,
//! trajectories that fall into the cusp or leave the chart simply never
//! return, and integrator failures are logged per sample rather than
//! aborting the batch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{dist, flow, reduce_to_fundamental_domain, wrap_angle, HalfPlanePoint, UnitTangent};
use crate::metric::{
    frame_angle_to_vec, integrate_geodesic, metric_at, ChartPoint, IntOpts, MetricBackend,
};

/// What happened to one sampled tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum SampleOutcome {
    /// First re-entry into the δ-ball, refined to the local closest pass.
    Returned { time: f64 },
    /// No re-entry within the horizon.
    NoReturn,
    /// The chart integrator gave up on this trajectory.
    IntegrationError { reason: String },
}

/// Batch statistics for one recurrence run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub backend: MetricBackend,
    pub samples: usize,
    pub t_horizon: f64,
    pub delta: f64,
    pub seed: u64,
    /// Detection grid step actually used.
    pub step: f64,
    pub outcomes: Vec<SampleOutcome>,
    /// Fraction of samples that returned within the horizon.
    pub fraction_recurrent: f64,
    /// (T, fraction returned by T) at ten even checkpoints.
    pub fraction_by: Vec<(f64, f64)>,
    /// Number of integration errors logged.
    pub errors: usize,
}

/// Draws a Liouville-distributed unit tangent in the fundamental domain:
/// x = sin θ with θ uniform in [−π/6, π/6] (the dx/√(1−x²) marginal),
/// y = y_min/(1−V) (the 1/y² conditional), direction uniform.
pub fn liouville_tangent(rng: &mut impl Rng) -> UnitTangent {
    let theta = (rng.gen::<f64>() * 2.0 - 1.0) * std::f64::consts::FRAC_PI_6;
    let x = theta.sin();
    let y_min = (1.0 - x * x).sqrt();
    let v: f64 = rng.gen();
    let y = y_min / (1.0 - v).max(f64::MIN_POSITIVE);
    let dir = (rng.gen::<f64>() * 2.0 - 1.0) * std::f64::consts::PI;
    UnitTangent::new(
        HalfPlanePoint::new(x, y).expect("Liouville sampler stays in the upper half-plane"),
        dir,
    )
}

fn reduce_tangent(u: &UnitTangent) -> Result<UnitTangent> {
    let (_, g) = reduce_to_fundamental_domain(&u.base)?;
    Ok(g.apply_tangent(u))
}

/// First re-entry on the quotient under an arbitrary gap functional:
/// fixed-grid detection plus local refinement of the closest pass.
fn first_return_by(
    start: &UnitTangent,
    t_horizon: f64,
    delta: f64,
    step: f64,
    gap: impl Fn(&UnitTangent) -> f64,
) -> Result<Option<f64>> {
    let mut v = *start;
    let mut t = 0.0f64;
    let mut exited = false;
    while t < t_horizon {
        let prev = v;
        let prev_t = t;
        v = reduce_tangent(&flow(&v, step))?;
        t += step;
        let d = gap(&v);
        if !exited {
            if d > delta {
                exited = true;
            }
            continue;
        }
        if d <= delta {
            return Ok(Some(refine_closest_pass(&prev, prev_t, step, delta, &gap)?));
        }
    }
    Ok(None)
}

/// Footpoint-ball first return (the Monte Carlo detector).
fn first_return_hyperbolic(
    start: &UnitTangent,
    t_horizon: f64,
    delta: f64,
    step: f64,
) -> Result<Option<f64>> {
    let home = start.base;
    first_return_by(start, t_horizon, delta, step, move |v| dist(&v.base, &home))
}

/// Walks forward from `from` (at time `t0`) on a grid of `step`/64,
/// returning the time of the first local minimum of the gap inside the
/// δ-ball.
fn refine_closest_pass(
    from: &UnitTangent,
    t0: f64,
    step: f64,
    delta: f64,
    gap: &impl Fn(&UnitTangent) -> f64,
) -> Result<f64> {
    let fine = step / 64.0;
    let mut v = *from;
    let mut t = t0;
    let mut best: Option<(f64, f64)> = None;
    let mut rises = 0usize;
    // Cover at most four coarse steps: the pass is inside the first two,
    // the rest is margin for shallow minima.
    for _ in 0..(4 * 64) {
        v = reduce_tangent(&flow(&v, fine))?;
        t += fine;
        let d = gap(&v);
        if d <= delta {
            match best {
                Some((_, bd)) if d >= bd => {
                    rises += 1;
                    if rises >= 8 {
                        break;
                    }
                }
                _ => {
                    best = Some((t, d));
                    rises = 0;
                }
            }
        } else if best.is_some() {
            break;
        }
    }
    Ok(best.expect("re-entry bracketed by the caller").0)
}

/// First re-entry in the cusp-model chart: one integration over the
/// horizon, ball measured with the metric tensor at the start.
fn first_return_chart(
    backend: &MetricBackend,
    pos: ChartPoint,
    theta: f64,
    t_horizon: f64,
    delta: f64,
    step: f64,
) -> Result<Option<f64>> {
    let v0 = frame_angle_to_vec(backend, pos, theta)?;
    let tensor = metric_at(backend, pos)?;
    let opts = IntOpts { h_max: step, cusp_stop: Some(1e-6), ..IntOpts::default() };
    let path = integrate_geodesic(backend, pos, v0, t_horizon, &opts)?;
    let mut exited = false;
    let end = path.end().s;
    let mut s = step;
    while s <= end {
        let (p, _) = path.at(s);
        let dvec = [p.c1 - pos.c1, p.c2 - pos.c2];
        let d = tensor.norm(dvec);
        if !exited {
            if d > delta {
                exited = true;
            }
        } else if d <= delta {
            return Ok(Some(s));
        }
        s += step;
    }
    Ok(None)
}

/// Runs the recurrence experiment: `samples` tangents, horizon
/// `t_horizon`, ball radius `delta`, deterministic under `seed`.
pub fn recurrence_mc(
    backend: &MetricBackend,
    samples: usize,
    t_horizon: f64,
    delta: f64,
    seed: u64,
) -> Result<RecurrenceReport> {
    if !(t_horizon.is_finite() && t_horizon > 0.0) {
        return Err(Error::Config {
            field: "t_horizon".into(),
            reason: format!("must be a positive finite time, got {t_horizon}"),
        });
    }
    if !(delta.is_finite() && delta > 0.0 && delta <= 1.0) {
        return Err(Error::Config {
            field: "delta".into(),
            reason: format!("ball radius must lie in (0, 1], got {delta}"),
        });
    }
    let step = (delta / 2.0).min(0.05);
    let outcomes: Vec<SampleOutcome> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            run_sample(backend, &mut rng, t_horizon, delta, step)
        })
        .collect();
    Ok(assemble_report(*backend, samples, t_horizon, delta, seed, step, outcomes))
}

fn run_sample(
    backend: &MetricBackend,
    rng: &mut ChaCha8Rng,
    t_horizon: f64,
    delta: f64,
    step: f64,
) -> SampleOutcome {
    let result = match backend {
        MetricBackend::Hyperbolic => {
            let start = liouville_tangent(rng);
            first_return_hyperbolic(&start, t_horizon, delta, step)
        }
        MetricBackend::WeilPetersson(w) => {
            // Uniform under the flat area form ½·dℓ∧dτ on a window away
            // from both chart edges; direction uniform in the frame.
            let ell = w.ell_max * (0.25 + 0.5 * rng.gen::<f64>());
            let tau = rng.gen::<f64>() * 2.0 - 1.0;
            let theta = (rng.gen::<f64>() * 2.0 - 1.0) * std::f64::consts::PI;
            first_return_chart(backend, ChartPoint::new(ell, tau), theta, t_horizon, delta, step)
        }
    };
    match result {
        Ok(Some(time)) => SampleOutcome::Returned { time },
        Ok(None) => SampleOutcome::NoReturn,
        Err(e) => SampleOutcome::IntegrationError { reason: e.to_string() },
    }
}

fn assemble_report(
    backend: MetricBackend,
    samples: usize,
    t_horizon: f64,
    delta: f64,
    seed: u64,
    step: f64,
    outcomes: Vec<SampleOutcome>,
) -> RecurrenceReport {
    let returned: Vec<f64> = outcomes
        .iter()
        .filter_map(|o| match o {
            SampleOutcome::Returned { time } => Some(*time),
            _ => None,
        })
        .collect();
    let errors = outcomes
        .iter()
        .filter(|o| matches!(o, SampleOutcome::IntegrationError { .. }))
        .count();
    let fraction_recurrent = if samples == 0 {
        0.0
    } else {
        returned.len() as f64 / samples as f64
    };
    let fraction_by: Vec<(f64, f64)> = (1..=10)
        .map(|k| {
            let t = t_horizon * k as f64 / 10.0;
            let frac = if samples == 0 {
                0.0
            } else {
                returned.iter().filter(|&&r| r <= t).count() as f64 / samples as f64
            };
            (t, frac)
        })
        .collect();
    RecurrenceReport {
        backend,
        samples,
        t_horizon,
        delta,
        seed,
        step,
        outcomes,
        fraction_recurrent,
        fraction_by,
        errors,
    }
}

/// A unit tangent on the shortest closed geodesic: base i, direction
/// along the axis of the trace-3 class, so the flow is periodic with
/// period 2·arccosh(3/2).
pub fn shortest_orbit_tangent() -> UnitTangent {
    let base = HalfPlanePoint::new(0.0, 1.0).expect("i is interior");
    // Axis: semicircle centered 1/2 with radius √5/2; the tangent at i
    // headed toward the apex makes angle −arccos(1/√5) with vertical.
    UnitTangent::new(base, -(1.0 / 5.0f64.sqrt()).acos())
}

/// Phase-space first return time of the shortest closed orbit: footpoint
/// distance plus direction gap must close to within `delta` after the
/// orbit has left that ball. The basepoint is taken a short way along
/// the loop so it avoids the order-2 cone point (see the module docs);
/// the result is the orbit period, refined to a grid of (δ/2)/64.
pub fn shortest_orbit_return(delta: f64) -> Result<f64> {
    if !(delta.is_finite() && delta > 0.0 && delta <= 1.0) {
        return Err(Error::Config {
            field: "delta".into(),
            reason: format!("ball radius must lie in (0, 1], got {delta}"),
        });
    }
    let start = flow(&shortest_orbit_tangent(), 0.3);
    let step = (delta / 2.0).min(0.05);
    let horizon = 4.0;
    let phase =
        move |v: &UnitTangent| dist(&v.base, &start.base) + wrap_angle(v.dir() - start.dir()).abs();
    first_return_by(&start, horizon, delta, step, phase)?.ok_or(Error::NoConvergence {
        endpoint_error: delta,
        iterations: (horizon / step) as u32,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp::{in_fundamental_domain, wrap_angle};

    #[test]
    fn closed_orbit_returns_at_its_period() {
        let t = shortest_orbit_return(0.05).unwrap();
        assert!(
            (t - 1.9248473002384139).abs() <= 1e-3,
            "returned at {t}, expected the orbit length"
        );
    }

    /// The footpoint curve of the shortest closed orbit revisits the
    /// cone point at half the period (the orbit is reversed by the
    /// order-2 symmetry), so the position-only detector fires there.
    #[test]
    fn footpoint_detector_sees_the_reflected_pass_early() {
        let start = shortest_orbit_tangent();
        let t = first_return_hyperbolic(&start, 4.0, 0.05, 0.025)
            .unwrap()
            .expect("the closed orbit returns");
        let half = 1.5f64.acosh();
        assert!((t - half).abs() <= 1e-3, "returned at {t}, expected half-period {half}");
    }

    #[test]
    fn the_orbit_tangent_is_actually_periodic() {
        // Basepoint away from the cone point, where the reduction's
        // direction report is unambiguous.
        let start = flow(&shortest_orbit_tangent(), 0.3);
        let len = 2.0 * 1.5f64.acosh();
        let mut v = start;
        for _ in 0..8 {
            v = reduce_tangent(&flow(&v, len / 8.0)).unwrap();
        }
        assert!(dist(&v.base, &start.base) < 1e-9);
        assert!(wrap_angle(v.dir() - start.dir()).abs() < 1e-9);
    }

    #[test]
    fn liouville_samples_live_in_the_fundamental_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let t = liouville_tangent(&mut rng);
            assert!(in_fundamental_domain(&t.base));
            assert!(t.dir() > -std::f64::consts::PI - 1e-12);
            assert!(t.dir() <= std::f64::consts::PI + 1e-12);
        }
    }

    #[test]
    fn fractions_are_monotone_and_deterministic() {
        let backend = MetricBackend::Hyperbolic;
        let a = recurrence_mc(&backend, 64, 10.0, 0.2, 11).unwrap();
        let b = recurrence_mc(&backend, 64, 25.0, 0.2, 11).unwrap();
        let c = recurrence_mc(&backend, 64, 50.0, 0.2, 11).unwrap();
        assert!(a.fraction_recurrent <= b.fraction_recurrent + 1e-12);
        assert!(b.fraction_recurrent <= c.fraction_recurrent + 1e-12);
        for w in c.fraction_by.windows(2) {
            assert!(w[0].1 <= w[1].1 + 1e-12);
        }
        let c2 = recurrence_mc(&backend, 64, 50.0, 0.2, 11).unwrap();
        assert_eq!(c.outcomes, c2.outcomes);
    }

    #[test]
    fn long_horizons_recur_heavily() {
        let report = recurrence_mc(&MetricBackend::Hyperbolic, 128, 50.0, 0.2, 7).unwrap();
        assert!(
            report.fraction_recurrent >= 0.85,
            "fraction {}",
            report.fraction_recurrent
        );
        assert_eq!(report.errors, 0);
    }

    #[test]
    fn zero_samples_is_an_empty_report() {
        let report = recurrence_mc(&MetricBackend::Hyperbolic, 0, 10.0, 0.2, 1).unwrap();
        assert!(report.outcomes.is_empty());
        assert_eq!(report.fraction_recurrent, 0.0);
        assert!(report.fraction_by.iter().all(|&(_, f)| f == 0.0));
    }

    #[test]
    fn cusp_chart_backend_runs_without_returns() {
        let report = recurrence_mc(&MetricBackend::wp_default(), 16, 5.0, 0.1, 3).unwrap();
        assert_eq!(report.outcomes.len(), 16);
        // Chart geodesics fall toward the cusp or exit; none re-enter the
        // start ball, and any integrator trouble is logged, not fatal.
        for o in &report.outcomes {
            assert!(!matches!(o, SampleOutcome::Returned { .. }));
        }
    }

    #[test]
    fn bad_parameters_are_rejected() {
        let h = MetricBackend::Hyperbolic;
        assert!(recurrence_mc(&h, 1, -1.0, 0.2, 0).is_err());
        assert!(recurrence_mc(&h, 1, 10.0, 0.0, 0).is_err());
        assert!(recurrence_mc(&h, 1, 10.0, 2.0, 0).is_err());
    }
}
