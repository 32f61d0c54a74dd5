//! Riemannian backends over a common two-coordinate chart.
//!
//! Both backends expose a diagonal metric `ds² = g11·dc1² + g22·dc2²`:
//!
//! * [`MetricBackend::Hyperbolic`] — the upper half-plane, chart
//!   `(c1, c2) = (x, y)` with `y > 0`, `g11 = g22 = 1/y²`, curvature `-1`
//!   everywhere.
//! * [`MetricBackend::WeilPetersson`] — a cusp-model surface of revolution
//!   in length/twist coordinates `(c1, c2) = (ℓ, τ)` with `0 < ℓ ≤ ell_max`:
//!   `g22 = B(ℓ) = c·ℓ^s` and `g11 = A(ℓ) = 1/(4B)`, where
//!   `c = 1/(2π·ell_ref^(s-1))`. The product `A·B = 1/4` is exact, so the
//!   area form is `dℓ dτ / 2` independent of the parameters. The Gaussian
//!   curvature is `K = -2B'' = -2·c·s(s-1)·ℓ^(s-2)`, which for the default
//!   exponent `s = 3/2` gives `K = -3/(4π√ℓ)`: negative everywhere, and
//!   diverging at the `ℓ → 0` cusp, which sits at the finite distance
//!   `r(ℓ₀) = ℓ₀^(1-s/2)/((2-s)√c)` from level `ℓ₀`.
//!
//! In the arclength chart `r` (distance to the cusp), the model is
//! `dr² + f(r)²dτ²` with `f(r) = √(B(ℓ(r)))` ([`wp_circumference`]); for
//! `s = 3/2` it reduces to `f(r) = c²r³/8` and `K = -6/r²` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::point::HalfPlanePoint;

pub mod chord;
pub mod integrate;

pub use chord::{chord_bvp, ChordOpts};
pub use integrate::{integrate_geodesic, GeodesicPath, IntOpts, PathSample, StopReason};

/// Parameters of the cusp-model backend.
///
/// `exponent` is the power `s` in `B(ℓ) = ℓ^s/(2π·ell_ref^(s-1))`; it must
/// lie in `(0, 2)` so the cusp is at finite distance. Values in `(1, 2)`
/// give strictly negative curvature diverging at the cusp (the default is
/// `3/2`); `s = 1` is the degenerate flat calibration, kept available for
/// comparison runs. `ell_ref` is the length scale where `B = ell_ref/(2π)`,
/// and `ell_max` bounds the chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WpParams {
    pub exponent: f64,
    pub ell_ref: f64,
    pub ell_max: f64,
}

impl Default for WpParams {
    fn default() -> Self {
        Self { exponent: 1.5, ell_ref: 1.0, ell_max: 4.0 }
    }
}

impl WpParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.exponent.is_finite() && self.exponent > 0.0 && self.exponent < 2.0) {
            return Err(Error::Config {
                field: "exponent".into(),
                reason: format!("must lie in (0, 2), got {}", self.exponent),
            });
        }
        if !(self.ell_ref.is_finite() && self.ell_ref > 0.0) {
            return Err(Error::Config {
                field: "ell_ref".into(),
                reason: format!("must be positive, got {}", self.ell_ref),
            });
        }
        if !(self.ell_max.is_finite() && self.ell_max > 0.0) {
            return Err(Error::Config {
                field: "ell_max".into(),
                reason: format!("must be positive, got {}", self.ell_max),
            });
        }
        Ok(())
    }

    /// The coefficient `c` in `B(ℓ) = c·ℓ^s`.
    pub fn coeff(&self) -> f64 {
        1.0 / (2.0 * std::f64::consts::PI * self.ell_ref.powf(self.exponent - 1.0))
    }
}

/// One of the two Riemannian backends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "backend", rename_all = "snake_case")]
pub enum MetricBackend {
    Hyperbolic,
    WeilPetersson(WpParams),
}

impl MetricBackend {
    pub fn wp_default() -> Self {
        Self::WeilPetersson(WpParams::default())
    }

    /// Whether `p` lies in the backend's chart domain.
    pub fn contains(&self, p: ChartPoint) -> bool {
        match self {
            Self::Hyperbolic => p.c2 > 0.0 && p.c1.is_finite() && p.c2.is_finite(),
            Self::WeilPetersson(w) => {
                p.c1 > 0.0 && p.c1 <= w.ell_max && p.c1.is_finite() && p.c2.is_finite()
            }
        }
    }

    fn check(&self, p: ChartPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideChart { c1: p.c1, c2: p.c2 })
        }
    }
}

/// A point in a backend's coordinate chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub c1: f64,
    pub c2: f64,
}

impl ChartPoint {
    pub fn new(c1: f64, c2: f64) -> Self {
        Self { c1, c2 }
    }

    pub fn from_halfplane(p: HalfPlanePoint) -> Self {
        Self { c1: p.x(), c2: p.y() }
    }

    pub fn to_halfplane(self) -> Result<HalfPlanePoint> {
        HalfPlanePoint::new(self.c1, self.c2)
    }
}

/// The diagonal metric tensor at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricTensor {
    pub g11: f64,
    pub g22: f64,
}

impl MetricTensor {
    pub fn det(&self) -> f64 {
        self.g11 * self.g22
    }

    pub fn inner(&self, u: [f64; 2], v: [f64; 2]) -> f64 {
        self.g11 * u[0] * v[0] + self.g22 * u[1] * v[1]
    }

    pub fn norm2(&self, v: [f64; 2]) -> f64 {
        self.inner(v, v)
    }

    pub fn norm(&self, v: [f64; 2]) -> f64 {
        self.norm2(v).sqrt()
    }
}

/// Metric tensor of `backend` at `p`.
pub fn metric_at(backend: &MetricBackend, p: ChartPoint) -> Result<MetricTensor> {
    backend.check(p)?;
    Ok(match backend {
        MetricBackend::Hyperbolic => {
            let inv_y2 = 1.0 / (p.c2 * p.c2);
            MetricTensor { g11: inv_y2, g22: inv_y2 }
        }
        MetricBackend::WeilPetersson(w) => {
            let b = w.coeff() * p.c1.powf(w.exponent);
            MetricTensor { g11: 0.25 / b, g22: b }
        }
    })
}

/// Gaussian curvature of `backend` at `p`.
pub fn curvature_at(backend: &MetricBackend, p: ChartPoint) -> Result<f64> {
    backend.check(p)?;
    Ok(match backend {
        MetricBackend::Hyperbolic => -1.0,
        MetricBackend::WeilPetersson(w) => {
            let s = w.exponent;
            -2.0 * w.coeff() * s * (s - 1.0) * p.c1.powf(s - 2.0)
        }
    })
}

/// Geodesic acceleration `(c1'', c2'')` for chart velocity `v` at `p`.
///
/// Hyperbolic: `x'' = 2·x'y'/y`, `y'' = (y'² - x'²)/y`.
/// Cusp model: `ℓ'' = s/(2ℓ)·ℓ'² + 2c²s·ℓ^(2s-1)·τ'²`, `τ'' = -(s/ℓ)·ℓ'τ'`.
pub fn geodesic_accel(backend: &MetricBackend, p: ChartPoint, v: [f64; 2]) -> [f64; 2] {
    match backend {
        MetricBackend::Hyperbolic => {
            let y = p.c2;
            [2.0 * v[0] * v[1] / y, (v[1] * v[1] - v[0] * v[0]) / y]
        }
        MetricBackend::WeilPetersson(w) => {
            let s = w.exponent;
            let c = w.coeff();
            let ell = p.c1;
            let l1 = s / (2.0 * ell) * v[0] * v[0]
                + 2.0 * c * c * s * ell.powf(2.0 * s - 1.0) * v[1] * v[1];
            let t1 = -(s / ell) * v[0] * v[1];
            [l1, t1]
        }
    }
}

/// Rescales `v` to unit metric norm at `p`.
pub fn unit_speed(backend: &MetricBackend, p: ChartPoint, v: [f64; 2]) -> Result<[f64; 2]> {
    let g = metric_at(backend, p)?;
    let n = g.norm(v);
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::ProjectionFailure {
            reason: format!("cannot normalize chart vector ({}, {})", v[0], v[1]),
        });
    }
    Ok([v[0] / n, v[1] / n])
}

/// Unit chart vector whose metric-orthonormal-frame angle is `theta`
/// (measured from the `+c1` frame direction toward `+c2`).
pub fn frame_angle_to_vec(backend: &MetricBackend, p: ChartPoint, theta: f64) -> Result<[f64; 2]> {
    let g = metric_at(backend, p)?;
    Ok([theta.cos() / g.g11.sqrt(), theta.sin() / g.g22.sqrt()])
}

/// Inverse of [`frame_angle_to_vec`]; returns the frame angle of `v`.
pub fn vec_to_frame_angle(backend: &MetricBackend, p: ChartPoint, v: [f64; 2]) -> Result<f64> {
    let g = metric_at(backend, p)?;
    Ok((v[1] * g.g22.sqrt()).atan2(v[0] * g.g11.sqrt()))
}

/// Distance from level `ell` to the cusp along a radial geodesic:
/// `r(ℓ) = ℓ^(1-s/2) / ((2-s)·√c)`.
pub fn wp_radial_distance(w: &WpParams, ell: f64) -> f64 {
    let s = w.exponent;
    ell.powf(1.0 - s / 2.0) / ((2.0 - s) * w.coeff().sqrt())
}

/// Inverse of [`wp_radial_distance`]: the level at distance `r` from the cusp.
pub fn wp_ell_at_distance(w: &WpParams, r: f64) -> f64 {
    let s = w.exponent;
    ((2.0 - s) * w.coeff().sqrt() * r).powf(2.0 / (2.0 - s))
}

/// Circumference of the twist circle at distance `r` from the cusp,
/// `f(r) = √B(ℓ(r))`. For the default exponent this is `c²r³/8`.
pub fn wp_circumference(w: &WpParams, r: f64) -> f64 {
    let ell = wp_ell_at_distance(w, r);
    (w.coeff() * ell.powf(w.exponent)).sqrt()
}

/// Inverse of [`wp_circumference`]: the radial distance whose twist circle
/// has circumference `f` (monotone, since the circumference grows with
/// distance from the cusp).
pub fn wp_r_of_circumference(w: &WpParams, f: f64) -> f64 {
    let s = w.exponent;
    let c = w.coeff();
    let ell = (f * f / c).powf(1.0 / s);
    wp_radial_distance(w, ell)
}
