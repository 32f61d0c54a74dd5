//! Adaptive geodesic integration over either backend.
//!
//! The integrator is an embedded Dormand–Prince 5(4) pair with the FSAL
//! economization, proportional step control against [`crate::tol::ODE_RTOL`]
//! / [`crate::tol::ODE_ATOL`], and a hard step floor below which it reports
//! [`Error::StepUnderflow`] instead of silently degrading. Velocities are
//! never renormalized mid-run: the metric norm of the state is carried by
//! the scheme alone, and staying within [`crate::tol::TOL_NORM`] over runs
//! of length ≲ 20 is part of the accuracy contract (and is tested).
//!
//! Accepted steps are capped at `h_max`, yielding samples dense enough that
//! cubic Hermite interpolation between neighbors ([`GeodesicPath::at`])
//! stays far below the solver tolerances used by callers. Stop events
//! (cusp entry, chart edge) are localized by bisection on the Hermite
//! interpolant of the event coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{geodesic_accel, unit_speed, ChartPoint, MetricBackend};
use crate::tol;

/// Integration options.
#[derive(Debug, Clone, Copy)]
pub struct IntOpts {
    /// Cap on the accepted step (also the sample spacing bound).
    pub h_max: f64,
    /// Stop when the cusp coordinate crosses this level: `y ≥ level` on the
    /// half-plane backend (horoball entry), `ℓ ≤ level` on the cusp model.
    /// On the cusp model a `None` still stops at the ℓ = 0 chart edge.
    pub cusp_stop: Option<f64>,
    /// Safety cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for IntOpts {
    fn default() -> Self {
        Self { h_max: tol::ODE_STEP_MAX, cusp_stop: None, max_steps: 4_000_000 }
    }
}

/// Why integration ended before reaching the requested length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The cusp-stop level was crossed.
    CuspStop,
    /// The trajectory reached the boundary of the chart domain.
    ChartEdge,
}

/// One sample of an integrated path: arclength, position, chart velocity.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PathSample {
    pub s: f64,
    pub pos: ChartPoint,
    pub vel: [f64; 2],
}

/// A sampled geodesic with dense cubic-Hermite evaluation between samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub backend: MetricBackend,
    pub samples: Vec<PathSample>,
    pub stop: Option<StopReason>,
}

impl GeodesicPath {
    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("paths always hold at least one sample")
    }

    /// Arclength actually covered (shorter than requested on a stop event).
    pub fn length(&self) -> f64 {
        self.end().s - self.start().s
    }

    /// Position and velocity at arclength `s` (clamped to the sampled
    /// range), by cubic Hermite interpolation between bracketing samples.
    pub fn at(&self, s: f64) -> (ChartPoint, [f64; 2]) {
        let s = s.clamp(self.start().s, self.end().s);
        let idx = self.samples.partition_point(|smp| smp.s <= s);
        if idx == 0 {
            let a = self.start();
            return (a.pos, a.vel);
        }
        if idx >= self.samples.len() {
            let b = self.end();
            return (b.pos, b.vel);
        }
        let (a, b) = (&self.samples[idx - 1], &self.samples[idx]);
        let h = b.s - a.s;
        if h <= 0.0 {
            return (a.pos, a.vel);
        }
        let t = (s - a.s) / h;
        let acc_a = geodesic_accel(&self.backend, a.pos, a.vel);
        let acc_b = geodesic_accel(&self.backend, b.pos, b.vel);
        let pos = ChartPoint::new(
            hermite(a.pos.c1, a.vel[0], b.pos.c1, b.vel[0], h, t),
            hermite(a.pos.c2, a.vel[1], b.pos.c2, b.vel[1], h, t),
        );
        let vel = [
            hermite(a.vel[0], acc_a[0], b.vel[0], acc_b[0], h, t),
            hermite(a.vel[1], acc_a[1], b.vel[1], acc_b[1], h, t),
        ];
        (pos, vel)
    }
}

/// Cubic Hermite basis evaluation on one interval of width `h`.
fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    y0 * (2.0 * t3 - 3.0 * t2 + 1.0)
        + d0 * h * (t3 - 2.0 * t2 + t)
        + y1 * (-2.0 * t3 + 3.0 * t2)
        + d1 * h * (t3 - t2)
}

type State = [f64; 4];

fn deriv(backend: &MetricBackend, y: &State) -> State {
    let p = ChartPoint::new(y[0], y[1]);
    let a = geodesic_accel(backend, p, [y[2], y[3]]);
    [y[2], y[3], a[0], a[1]]
}

/// Signed event coordinate of the nearest-to-firing event: an event fires
/// where its value becomes ≥ 0, and the two possible events (cusp stop,
/// chart edge) sit on opposite ends of the chart, so taking the maximum
/// keeps the coordinate continuous for bisection.
fn event_value(backend: &MetricBackend, opts: &IntOpts, p: ChartPoint) -> Option<(StopReason, f64)> {
    let mut best: Option<(StopReason, f64)> = None;
    let mut consider = |r: StopReason, v: f64| {
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((r, v));
        }
    };
    match backend {
        MetricBackend::Hyperbolic => {
            if let Some(level) = opts.cusp_stop {
                consider(StopReason::CuspStop, p.c2 - level);
            }
        }
        MetricBackend::WeilPetersson(w) => {
            // The chart ends at ℓ = 0: with no configured stop level the
            // run still halts there, because the equations continue to an
            // ℓ < 0 branch that has no geometric meaning.
            consider(StopReason::CuspStop, opts.cusp_stop.unwrap_or(0.0) - p.c1);
            consider(StopReason::ChartEdge, p.c1 - w.ell_max);
        }
    }
    best
}

// Dormand–Prince 5(4) tableau.
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
const ERR_W: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct StepResult {
    y_new: State,
    f_new: State,
    err: f64,
}

fn dp45_step(backend: &MetricBackend, y: &State, f0: &State, h: f64) -> StepResult {
    let lincomb = |coeffs: &[f64], ks: &[&State]| -> State {
        let mut out = *y;
        for (c, k) in coeffs.iter().zip(ks) {
            for i in 0..4 {
                out[i] += h * c * k[i];
            }
        }
        out
    };
    let k1 = *f0;
    let k2 = deriv(backend, &lincomb(&[0.2], &[&k1]));
    let k3 = deriv(backend, &lincomb(&A3, &[&k1, &k2]));
    let k4 = deriv(backend, &lincomb(&A4, &[&k1, &k2, &k3]));
    let k5 = deriv(backend, &lincomb(&A5, &[&k1, &k2, &k3, &k4]));
    let k6 = deriv(backend, &lincomb(&A6, &[&k1, &k2, &k3, &k4, &k5]));
    let y_new = lincomb(&B5, &[&k1, &k2, &k3, &k4, &k5, &k6]);
    let f_new = deriv(backend, &y_new);
    let ks = [&k1, &k2, &k3, &k4, &k5, &k6, &f_new];
    let mut err_sq = 0.0;
    for i in 0..4 {
        let mut e = 0.0;
        for (w, k) in ERR_W.iter().zip(&ks) {
            e += w * k[i];
        }
        e *= h;
        let scale = tol::ODE_ATOL + tol::ODE_RTOL * y[i].abs().max(y_new[i].abs());
        err_sq += (e / scale) * (e / scale);
    }
    StepResult { y_new, f_new, err: (err_sq / 4.0).sqrt() }
}

fn sample_of(s: f64, y: &State) -> PathSample {
    PathSample { s, pos: ChartPoint::new(y[0], y[1]), vel: [y[2], y[3]] }
}

/// Integrates the unit-speed geodesic from `start` in chart direction `v0`
/// (rescaled to unit metric norm) for arclength `length`, sampling as it
/// goes. Stops early on the events configured in `opts`.
pub fn integrate_geodesic(
    backend: &MetricBackend,
    start: ChartPoint,
    v0: [f64; 2],
    length: f64,
    opts: &IntOpts,
) -> Result<GeodesicPath> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(Error::Config {
            field: "length".into(),
            reason: format!("must be a finite nonnegative arclength, got {length}"),
        });
    }
    let v = unit_speed(backend, start, v0)?;
    let mut y: State = [start.c1, start.c2, v[0], v[1]];
    let mut s = 0.0;
    let mut samples = vec![sample_of(s, &y)];
    let mut stop = None;

    // Immediate stop at the start point: a cusp-stop that already holds, or
    // standing on the chart edge while moving outward.
    if let Some((reason, val)) = event_value(backend, opts, start) {
        let outward = match reason {
            StopReason::CuspStop => true,
            StopReason::ChartEdge => y[2] > 0.0,
        };
        if val >= 0.0 && outward {
            return Ok(GeodesicPath { backend: *backend, samples, stop: Some(reason) });
        }
    }

    if length == 0.0 {
        return Ok(GeodesicPath { backend: *backend, samples, stop: None });
    }

    let mut f0 = deriv(backend, &y);
    let mut h = opts.h_max.min(length);
    let mut steps = 0usize;

    while s < length * (1.0 - 1e-15) {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::NonTermination { cap: opts.max_steps });
        }
        h = h.min(length - s).min(opts.h_max);
        if h < tol::ODE_STEP_FLOOR {
            return Err(Error::StepUnderflow { s });
        }
        let res = dp45_step(backend, &y, &f0, h);
        if !res.err.is_finite() {
            h *= 0.2;
            continue;
        }
        if res.err > 1.0 {
            h *= (0.9 * res.err.powf(-0.2)).max(0.2);
            continue;
        }

        // Accepted. Look for an event crossing inside the step.
        let p_new = ChartPoint::new(res.y_new[0], res.y_new[1]);
        let fired = event_value(backend, opts, p_new).filter(|&(_, v)| v >= 0.0);
        if let Some((reason, _)) = fired {
            let eval_at = |t: f64| -> State {
                let mut out = [0.0; 4];
                for i in 0..4 {
                    out[i] = hermite(y[i], f0[i], res.y_new[i], res.f_new[i], h, t);
                }
                out
            };
            let value_at = |t: f64| -> f64 {
                let st = eval_at(t);
                let p = ChartPoint::new(st[0], st[1]);
                event_value(backend, opts, p).map_or(-1.0, |(_, v)| v)
            };
            let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
            if value_at(0.0) < 0.0 {
                for _ in 0..80 {
                    let mid = 0.5 * (lo + hi);
                    if value_at(mid) >= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                    if hi - lo < 1e-14 {
                        break;
                    }
                }
            } else {
                hi = 0.0;
            }
            let yc = eval_at(hi);
            samples.push(sample_of(s + hi * h, &yc));
            stop = Some(reason);
            break;
        }

        s += h;
        y = res.y_new;
        f0 = res.f_new;
        samples.push(sample_of(s, &y));
        h *= (0.9 * res.err.powf(-0.2)).clamp(0.2, 5.0);
    }

    Ok(GeodesicPath { backend: *backend, samples, stop })
}
