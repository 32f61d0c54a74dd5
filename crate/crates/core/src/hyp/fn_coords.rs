use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length/twist coordinates of a marked surface: `ell` is the length of
/// the distinguished closed curve (`ell > 0`; the locus `ell = 0` is the
/// cusp, which has no interior representative), `tau` the twist along it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFN")]
pub struct FNPoint {
    ell: f64,
    tau: f64,
}

#[derive(Deserialize)]
struct RawFN {
    ell: f64,
    tau: f64,
}

impl TryFrom<RawFN> for FNPoint {
    type Error = Error;
    fn try_from(raw: RawFN) -> Result<Self> {
        FNPoint::new(raw.ell, raw.tau)
    }
}

impl FNPoint {
    pub fn new(ell: f64, tau: f64) -> Result<Self> {
        if !(ell.is_finite() && ell > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidLengthCoord { ell });
        }
        Ok(Self { ell, tau })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// The n-fold twist about the distinguished curve:
/// `(ℓ, τ) ↦ (ℓ, τ + n·ℓ)`, with `ℓ` unchanged exactly.
pub fn dehn_twist_fn(p: &FNPoint, n: i64) -> FNPoint {
    FNPoint { ell: p.ell, tau: p.tau + (n as f64) * p.ell }
}
