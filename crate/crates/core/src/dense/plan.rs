//! Generator sequences and concatenation plans.
//!
//! A plan fixes everything the chain builder needs before any geometry is
//! measured: the singular geodesics (each running cusp to cusp, with exact
//! rational endpoint data), the two scale parameters δ₁ > 2δ₂ > 0 (cusp
//! ball size and chord tracking distance, realized as horoball levels
//! h = 1/δ), a summable per-splice exterior-angle budget with Σε ≤ 1/2,
//! and the alignment maps. Aligning geodesic 0 sends its terminal cusp to
//! ∞; aligning geodesic j ≥ 1 sends its initial cusp to ∞, so that the
//! splice between consecutive geodesics happens inside the horoball at
//! their shared (glued) cusp, where the incoming geodesic is a vertical
//! heading up and the outgoing one is a vertical heading down, displaced
//! by an integer twist chosen at build time.

use std::collections::HashSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::hyp::{
    project_to_geodesic, BoundaryPoint, CompleteGeodesic, HalfPlanePoint, MappingClassElement,
    Rational,
};

/// Samples `count` distinct singular geodesics, deterministically in
/// `seed`. The first element is always the canonical geodesic from 0 to
/// ∞; the rest have endpoints drawn as random Stern–Brocot mediants
/// (random walk depth ≤ 6, random sign), so denominators stay small and
/// induced base directions spread out. Pairs are distinct as unordered
/// endpoint sets.
pub fn singular_geodesic_sequence(count: usize, seed: u64) -> Result<Vec<CompleteGeodesic>> {
    if count == 0 {
        return Err(Error::InvalidPlan { reason: "generator sequence must be non-empty".into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: HashSet<(Rational, Rational)> = HashSet::new();
    let zero = Rational::new(0, 1)?;
    seen.insert(pair_key(zero, Rational::infinity()));
    let mut out = vec![CompleteGeodesic::from_boundary(
        BoundaryPoint::from_rational(0, 1)?,
        BoundaryPoint::infinity(),
    )?];
    while out.len() < count {
        let a = stern_brocot_sample(&mut rng);
        let b = stern_brocot_sample(&mut rng);
        if a == b || !seen.insert(pair_key(a, b)) {
            continue;
        }
        out.push(CompleteGeodesic::from_boundary(
            BoundaryPoint::from_rational(a.p(), a.q())?,
            BoundaryPoint::from_rational(b.p(), b.q())?,
        )?);
    }
    Ok(out)
}

fn pair_key(a: Rational, b: Rational) -> (Rational, Rational) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// One random mediant from the Stern–Brocot tree: walk `depth` random
/// left/right steps from the root and return the final mediant, with a
/// random sign. Values are non-zero, finite, and have denominator ≤ 13.
fn stern_brocot_sample(rng: &mut ChaCha8Rng) -> Rational {
    let depth: u32 = rng.gen_range(1..=6);
    let (mut pl, mut ql, mut pr, mut qr) = (0i64, 1i64, 1i64, 0i64);
    let (mut p, mut q) = (1i64, 1i64);
    for _ in 0..depth {
        p = pl + pr;
        q = ql + qr;
        if rng.gen_bool(0.5) {
            pr = p;
            qr = q;
        } else {
            pl = p;
            ql = q;
        }
    }
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rational::new(sign * p, q).expect("mediants are non-zero")
}

/// Tangent direction a geodesic induces at its closest approach to the
/// base point i, following the geodesic's own orientation.
pub fn base_direction(g: &CompleteGeodesic) -> f64 {
    let base = HalfPlanePoint::new(0.0, 1.0).expect("base point is interior");
    let proj = project_to_geodesic(&base, &g.geo);
    let sigma = g.geo.sigma_of(&proj.foot);
    g.geo.tangent_at_sigma(sigma, g.forward()).dir()
}

/// A validated recipe for building chained concatenations.
#[derive(Debug, Clone)]
pub struct ConcatenationPlan {
    generator: Vec<CompleteGeodesic>,
    delta1: f64,
    delta2: f64,
    angle_budget: Vec<f64>,
    mcg_alignment: Vec<MappingClassElement>,
    /// Aligned anchor per geodesic: for j = 0 the image of the initial
    /// cusp under the terminal-cusp alignment (the base vertical's foot);
    /// for j ≥ 1 the image of the terminal cusp under the initial-cusp
    /// alignment (the aligned forward cusp, before twisting).
    anchors: Vec<Rational>,
}

impl ConcatenationPlan {
    /// Validates and aligns. Requirements: every geodesic runs cusp to
    /// cusp with exact rational endpoint data; endpoint pairs pairwise
    /// distinct; δ₁ > 2δ₂ > 0; every budget entry positive with total
    /// ≤ 1/2, one entry per splice; and δ₁ below half the working length
    /// 2·ln(q/δ₁) of every aligned geodesic (the stretch between its two
    /// level-1/δ₁ horoballs), so cusp balls stay clear of each other
    /// along each geodesic.
    pub fn new(
        generator: Vec<CompleteGeodesic>,
        delta1: f64,
        delta2: f64,
        angle_budget: Vec<f64>,
    ) -> Result<Self> {
        if generator.is_empty() {
            return Err(Error::InvalidPlan { reason: "generator sequence must be non-empty".into() });
        }
        if !(delta1.is_finite() && delta2.is_finite() && delta2 > 0.0 && delta1 > 2.0 * delta2) {
            return Err(Error::InvalidPlan {
                reason: format!("need delta1 > 2*delta2 > 0, got delta1={delta1}, delta2={delta2}"),
            });
        }
        if angle_budget.len() + 1 != generator.len() {
            return Err(Error::InvalidPlan {
                reason: format!(
                    "need one budget entry per splice: {} geodesics, {} entries",
                    generator.len(),
                    angle_budget.len()
                ),
            });
        }
        if angle_budget.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::InvalidPlan { reason: "budget entries must be positive".into() });
        }
        let total: f64 = angle_budget.iter().sum();
        if total > 0.5 + 1e-12 {
            return Err(Error::InvalidPlan {
                reason: format!("budget total {total} exceeds 1/2"),
            });
        }
        let mut seen = HashSet::new();
        for g in &generator {
            let (a, b) = endpoint_rationals(g)?;
            if a == b {
                return Err(Error::InvalidPlan { reason: "geodesic endpoints coincide".into() });
            }
            if !seen.insert(pair_key(a, b)) {
                return Err(Error::InvalidPlan {
                    reason: "generator contains a repeated endpoint pair".into(),
                });
            }
        }
        let mut mcg_alignment = Vec::with_capacity(generator.len());
        let mut anchors = Vec::with_capacity(generator.len());
        for (j, g) in generator.iter().enumerate() {
            let (a, b) = endpoint_rationals(g)?;
            let (align, anchor_src) =
                if j == 0 { (MappingClassElement::cusp_to_infinity(&b), a) } else { (MappingClassElement::cusp_to_infinity(&a), b) };
            let image = align.apply_boundary(&BoundaryPoint::from_rational(
                anchor_src.p(),
                anchor_src.q(),
            )?)?;
            let anchor = image.rational.ok_or_else(|| Error::InvalidPlan {
                reason: "alignment lost exact endpoint data".into(),
            })?;
            if anchor.is_infinity() {
                return Err(Error::InvalidPlan {
                    reason: "aligned anchor landed at infinity (endpoints must be distinct)".into(),
                });
            }
            mcg_alignment.push(align);
            anchors.push(anchor);
        }
        let h1 = 1.0 / delta1;
        for (j, anchor) in anchors.iter().enumerate() {
            let half_working = (h1 * anchor.q() as f64).ln();
            if delta1 >= half_working {
                return Err(Error::InvalidPlan {
                    reason: format!(
                        "delta1 {delta1} is not below half the working length {half_working:.4} of geodesic {j}"
                    ),
                });
            }
        }
        Ok(Self { generator, delta1, delta2, angle_budget, mcg_alignment, anchors })
    }

    /// The default plan: sampled generator, δ₁ = 0.5, δ₂ = 0.2, and the
    /// center-symmetric budget ε = ε₀/(k+1)² with ε₀ = 0.1, where k is a
    /// splice's distance from the center of the splice list. Splices far
    /// from the center get small budgets, so chords nested around the
    /// center see only shrinking exterior angles toward their endpoints.
    pub fn standard(count: usize, seed: u64) -> Result<Self> {
        let generator = singular_geodesic_sequence(count, seed)?;
        let splices = count.saturating_sub(1);
        let budget = center_symmetric_budget(splices, 0.1);
        Self::new(generator, 0.5, 0.2, budget)
    }

    pub fn generator(&self) -> &[CompleteGeodesic] {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.generator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generator.is_empty()
    }

    pub fn delta1(&self) -> f64 {
        self.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.delta2
    }

    /// Horoball level of the δ₁ cusp balls.
    pub fn h1(&self) -> f64 {
        1.0 / self.delta1
    }

    /// Horoball level at which splices cross (chord height).
    pub fn h2(&self) -> f64 {
        1.0 / self.delta2
    }

    pub fn angle_budget(&self) -> &[f64] {
        &self.angle_budget
    }

    pub fn mcg_alignment(&self) -> &[MappingClassElement] {
        &self.mcg_alignment
    }

    pub fn anchors(&self) -> &[Rational] {
        &self.anchors
    }
}

/// ε₀/(k+1)² with k the distance from the center of the splice list;
/// total ≤ 2ε₀·π²/6 ≤ 1/2 for ε₀ = 0.1.
pub fn center_symmetric_budget(splices: usize, eps0: f64) -> Vec<f64> {
    (0..splices)
        .map(|i| {
            let k = (2 * i as i64 - (splices as i64 - 1)).unsigned_abs() / 2;
            eps0 / ((k + 1) * (k + 1)) as f64
        })
        .collect()
}

fn endpoint_rationals(g: &CompleteGeodesic) -> Result<(Rational, Rational)> {
    match (g.start.rational, g.end.rational) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::InvalidPlan {
            reason: "generator geodesics must carry exact rational endpoints".into(),
        }),
    }
}
