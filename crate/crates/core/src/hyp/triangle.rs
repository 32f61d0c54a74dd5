use crate::error::{Error, Result};

/// Length of the side opposite the angle `gamma` in a triangle with
/// angles `alpha`, `beta`, `gamma`, in the constant-curvature plane of
/// curvature `kappa < 0`:
///
/// `cosh(c·√|κ|) = (cos α · cos β + cos γ) / (sin α · sin β)`.
///
/// The angular law of cosines determines the triangle up to isometry, so
/// the side is a function of the three angles alone; curvature enters as
/// the global length rescaling `1/√|κ|`.
pub fn triangle_opposite_side(alpha: f64, beta: f64, gamma: f64, kappa: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < std::f64::consts::PI && beta > 0.0 && beta < std::f64::consts::PI) {
        return Err(Error::InvalidTriangle { rhs: f64::NAN });
    }
    if !(kappa < 0.0) {
        return Err(Error::InvalidTriangle { rhs: f64::NAN });
    }
    let rhs = (alpha.cos() * beta.cos() + gamma.cos()) / (alpha.sin() * beta.sin());
    // Round-off can leave the degenerate case a few ulps under 1.
    if rhs < 1.0 - 1e-12 {
        return Err(Error::InvalidTriangle { rhs });
    }
    Ok(rhs.max(1.0).acosh() / kappa.abs().sqrt())
}
