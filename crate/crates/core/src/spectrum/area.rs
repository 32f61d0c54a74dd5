//! Cusp-neighborhood areas under the flat chart area form.
//!
//! In the length/twist chart the area form is the constant ½·dℓ∧dτ, so
//! the cusp strip {ℓ < ε, |τ| < T} has area exactly ε·T: linear
//! divergence in the twist window even though ε is small. Taking the
//! twist quotient first — the sector {0 < τ < ℓ} — leaves the finite
//! area ε²/4. The contrast is the content of the table this module
//! produces.
//!
//! For the constant-curvature backend the analogous global quantity is
//! checkable: the fundamental domain has hyperbolic area π/3, verified
//! here by quadrature of the x-marginal 1/√(1−x²). The full moduli
//! area π²/12 of the target geometry is recorded as a constant for
//! reporting but deliberately not verified: the cusp chart models only
//! a neighborhood, not the global surface.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::WpParams;
use crate::quad;

/// Reported global area of the target geometry (π²/12). Recorded for
/// report headers only; nothing in this codebase verifies it.
pub const WP_MODULI_AREA_REPORTED: f64 = std::f64::consts::PI * std::f64::consts::PI / 12.0;

/// One row of the divergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspAreaRow {
    pub t: f64,
    /// Area of {ℓ < ε, |τ| < T}: exactly ε·T.
    pub strip_area: f64,
    /// Area of the twist-quotient sector {0 < τ < ℓ}: ε²/4, T-free.
    pub sector_area: f64,
}

/// The divergence table for a cusp width `eps` over a range of twist
/// windows. `eps` must lie inside the model chart.
pub fn cusp_area_divergence(
    eps: f64,
    t_values: &[f64],
    params: &WpParams,
) -> Result<Vec<CuspAreaRow>> {
    params.validate()?;
    if !(eps.is_finite() && eps > 0.0 && eps <= params.ell_max) {
        return Err(Error::Config {
            field: "eps".into(),
            reason: format!(
                "cusp width must lie in (0, ell_max = {}], got {eps}",
                params.ell_max
            ),
        });
    }
    let sector = eps * eps / 4.0;
    t_values
        .iter()
        .map(|&t| {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::Config {
                    field: "t_range".into(),
                    reason: format!("twist windows must be finite and non-negative, got {t}"),
                });
            }
            Ok(CuspAreaRow { t, strip_area: eps * t, sector_area: sector })
        })
        .collect()
}

/// Hyperbolic area of the fundamental domain by quadrature of the
/// x-marginal ∫ dx/√(1−x²) over [−1/2, 1/2]; equals π/3.
pub fn fundamental_domain_area(order: usize) -> f64 {
    quad::integrate(|x| 1.0 / (1.0 - x * x).sqrt(), -0.5, 0.5, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strip_area_is_exactly_eps_times_t() {
        let rows = cusp_area_divergence(0.1, &[0.0, 1.0, 10.0], &WpParams::default()).unwrap();
        assert_eq!(rows[0].strip_area, 0.0);
        assert_eq!(rows[1].strip_area, 0.1);
        assert!((rows[2].strip_area - 1.0).abs() < 1e-15);
        // Linear divergence: increments are constant in T.
        let d1 = rows[1].strip_area - rows[0].strip_area;
        let d2 = (rows[2].strip_area - rows[1].strip_area) / 9.0;
        assert!((d1 - d2).abs() < 1e-15);
    }

    #[test]
    fn sector_area_is_finite_and_t_free() {
        let rows = cusp_area_divergence(0.1, &[1.0, 100.0], &WpParams::default()).unwrap();
        assert!((rows[0].sector_area - 0.0025).abs() < 1e-18);
        assert_eq!(rows[0].sector_area, rows[1].sector_area);
    }

    /// Quadrature oracle: integrate the density ½ over the strip and ½·ℓ
    /// over the sector instead of using the closed forms.
    #[test]
    fn quadrature_reproduces_both_closed_forms() {
        let eps = 0.37;
        let t = 5.5;
        let strip = quad::integrate(|_| 0.5 * 2.0 * t, 0.0, eps, 32);
        assert!((strip - eps * t).abs() < 1e-12);
        let sector = quad::integrate(|ell| 0.5 * ell, 0.0, eps, 32);
        assert!((sector - eps * eps / 4.0).abs() < 1e-14);
    }

    #[test]
    fn fundamental_domain_area_is_pi_over_three() {
        let area = fundamental_domain_area(64);
        assert!((area - std::f64::consts::PI / 3.0).abs() < 1e-6);
    }

    #[test]
    fn reported_global_area_is_recorded_not_derived() {
        assert!((WP_MODULI_AREA_REPORTED - 0.8224670334241132).abs() < 1e-15);
    }

    #[test]
    fn chart_bounds_are_enforced() {
        let p = WpParams::default();
        assert!(cusp_area_divergence(0.0, &[1.0], &p).is_err());
        assert!(cusp_area_divergence(5.0, &[1.0], &p).is_err());
        assert!(cusp_area_divergence(0.1, &[-1.0], &p).is_err());
        assert!(cusp_area_divergence(0.1, &[f64::INFINITY], &p).is_err());
    }
}
