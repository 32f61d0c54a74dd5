//! Closed-geodesic census on the constant-curvature quotient.
//!
//! Primitive hyperbolic conjugacy classes of the integer Möbius group
//! correspond to cyclic words in the two parabolic generators
//! R = [[1,1],[0,1]] and L = [[1,0],[1,1]], written here as even-length
//! digit cycles (a₁, …, a₂ₖ) meaning R^{a₁}L^{a₂}⋯: the run lengths of
//! the word. Rotating the cycle by two digits re-reads the same word
//! from a different run, so the canonical class key is the
//! lexicographically minimal even rotation; digit reversal gives the
//! inverse class, which is counted separately. The geodesic length is
//! 2·arccosh(tr/2) with the trace an exact integer matrix product, so
//! census membership at a length cutoff is decided exactly.
//!
//! Enumeration is a depth-first search over digit cycles with monotone
//! pruning: appending digits only increases every matrix entry, hence
//! the eventual trace, so a branch dies as soon as the cheapest
//! completion already exceeds the trace cap. The axis of a class is a
//! semicircle whose apex height over the quotient is the classical
//! two-sided continued-fraction value max over rotations of
//! (α + 1/γ)/2; digit-bounded cycles therefore stay below an explicit
//! height, which is what the horseshoe experiments measure.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::MappingClassElement;

/// One primitive closed-geodesic class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedGeodesicClass {
    /// |trace| of the representative (≥ 3).
    pub trace: i64,
    /// 2·arccosh(trace/2).
    pub length: f64,
    pub representative: MappingClassElement,
    pub primitive: bool,
    /// Even-length digit cycle, canonical (lex-min even rotation).
    pub cf_period: Vec<u32>,
    /// Populated by the simple-geodesic experiments; None in the census.
    pub simple: Option<bool>,
}

/// The census up to a length cutoff, with the counting function N(T).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CensusTable {
    /// Sorted by (length, cf_period).
    pub classes: Vec<ClosedGeodesicClass>,
    pub t_max: f64,
    /// Step function: (length, cumulative count) at each jump.
    pub counts: Vec<(f64, usize)>,
}

impl CensusTable {
    /// N(T): number of classes of length ≤ T.
    pub fn n_at(&self, t: f64) -> usize {
        match self.counts.binary_search_by(|probe| {
            probe.0.partial_cmp(&t).expect("census lengths are finite")
        }) {
            Ok(mut i) => {
                while i + 1 < self.counts.len() && self.counts[i + 1].0 <= t {
                    i += 1;
                }
                self.counts[i].1
            }
            Err(0) => 0,
            Err(i) => self.counts[i - 1].1,
        }
    }
}

/// Length of the shortest closed geodesic, 2·arccosh(3/2).
pub fn shortest_closed_length() -> f64 {
    2.0 * 1.5f64.acosh()
}

fn trace_cap_for(t_max: f64) -> f64 {
    2.0 * (t_max / 2.0).cosh()
}

/// Exact product of the digit cycle as R/L powers; None on (astronomical)
/// overflow, which can only happen beyond any trace cap this module
/// accepts.
fn cycle_matrix(digits: &[u32]) -> Option<[i128; 4]> {
    let mut m = [1i128, 0, 0, 1];
    for (i, &a) in digits.iter().enumerate() {
        let a = a as i128;
        m = if i % 2 == 0 {
            // Right-multiply by R^a = [[1, a], [0, 1]].
            [
                m[0],
                m[0].checked_mul(a)?.checked_add(m[1])?,
                m[2],
                m[2].checked_mul(a)?.checked_add(m[3])?,
            ]
        } else {
            // Right-multiply by L^a = [[1, 0], [a, 1]].
            [
                m[0].checked_add(m[1].checked_mul(a)?)?,
                m[1],
                m[2].checked_add(m[3].checked_mul(a)?)?,
                m[3],
            ]
        };
    }
    Some(m)
}

/// Lexicographically minimal rotation by even offsets.
pub(crate) fn canonical_even_rotation(digits: &[u32]) -> Vec<u32> {
    let k = digits.len();
    let mut best: Option<Vec<u32>> = None;
    for start in (0..k).step_by(2) {
        let rot: Vec<u32> = (0..k).map(|i| digits[(start + i) % k]).collect();
        if best.as_ref().map_or(true, |b| rot < *b) {
            best = Some(rot);
        }
    }
    best.expect("non-empty cycle")
}

/// True when the pair sequence is not a proper power of a shorter cycle.
fn is_primitive(digits: &[u32]) -> bool {
    let pairs = digits.len() / 2;
    for d in 1..pairs {
        if pairs % d != 0 {
            continue;
        }
        let period = 2 * d;
        if (0..digits.len()).all(|i| digits[i] == digits[(i + period) % digits.len()]) {
            return false;
        }
    }
    true
}

/// All primitive classes of length ≤ `t_max`, each once under its
/// canonical key. Values of `t_max` below the shortest length give an
/// empty census; the cutoff is capped where traces would overflow the
/// exact integer representation.
pub fn enumerate_closed_geodesics(t_max: f64) -> Result<CensusTable> {
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::Config {
            field: "t_max".into(),
            reason: format!("length cutoff must be finite and non-negative, got {t_max}"),
        });
    }
    if t_max > 80.0 {
        return Err(Error::Config {
            field: "t_max".into(),
            reason: "length cutoffs beyond 80 overflow exact integer traces".into(),
        });
    }
    let cap = trace_cap_for(t_max).floor() as i128;
    let mut by_key: BTreeMap<Vec<u32>, ClosedGeodesicClass> = BTreeMap::new();
    if cap >= 3 {
        let first_digits: Vec<u32> = (1..=cap.min(1 << 20) as u64)
            .take_while(|&a| a as i128 + 2 <= cap)
            .map(|a| a as u32)
            .collect();
        let chunks: Vec<Vec<(Vec<u32>, ClosedGeodesicClass)>> = first_digits
            .par_iter()
            .map(|&a1| {
                let mut found = Vec::new();
                let mut digits = vec![a1];
                dfs_cycles(&mut digits, cap, &mut found);
                found
            })
            .collect();
        for chunk in chunks {
            for (key, class) in chunk {
                by_key.entry(key).or_insert(class);
            }
        }
    }
    let mut classes: Vec<ClosedGeodesicClass> = by_key.into_values().collect();
    classes.sort_by(|a, b| {
        a.length
            .partial_cmp(&b.length)
            .expect("finite lengths")
            .then_with(|| a.cf_period.cmp(&b.cf_period))
    });
    let mut counts = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        if counts.last().map_or(true, |&(t, _): &(f64, usize)| t < c.length) {
            counts.push((c.length, i + 1));
        } else if let Some(last) = counts.last_mut() {
            last.1 = i + 1;
        }
    }
    Ok(CensusTable { classes, t_max, counts })
}

/// Depth-first extension of a digit sequence. At even lengths the
/// current cycle is a candidate class; all appends monotonically
/// increase the trace of every completion, so a branch is pruned when
/// its cheapest closure exceeds the cap.
fn dfs_cycles(digits: &mut Vec<u32>, cap: i128, found: &mut Vec<(Vec<u32>, ClosedGeodesicClass)>) {
    let next_is_l = digits.len() % 2 == 1;
    for a in 1.. {
        digits.push(a);
        let m = match cycle_matrix(digits) {
            Some(m) => m,
            None => {
                digits.pop();
                break;
            }
        };
        if next_is_l {
            // Even length: candidate cycle.
            let tr = m[0] + m[3];
            if tr > cap {
                digits.pop();
                break;
            }
            if tr >= 3 {
                record_class(digits, m, found);
                // Cheapest deeper closure appends the pair (1, 1):
                // trace becomes 2·m00 + m01 + m10 + m11.
                if 2 * m[0] + m[1] + m[2] + m[3] <= cap {
                    dfs_cycles(digits, cap, found);
                }
            }
        } else {
            // Odd length: must close with at least L¹, giving trace
            // m00 + m01 + m11.
            let cheapest = m[0] + m[1] + m[3];
            if cheapest > cap {
                digits.pop();
                break;
            }
            dfs_cycles(digits, cap, found);
        }
        digits.pop();
    }
}

fn record_class(
    digits: &[u32],
    m: [i128; 4],
    found: &mut Vec<(Vec<u32>, ClosedGeodesicClass)>,
) {
    if !is_primitive(digits) {
        return;
    }
    let key = canonical_even_rotation(digits);
    if key != digits {
        // Every rotation is enumerated; record only the canonical one.
        return;
    }
    let tr = m[0] + m[3];
    let entries_fit =
        m.iter().all(|&e| e >= i64::MIN as i128 && e <= i64::MAX as i128);
    debug_assert!(entries_fit, "entries bounded by the trace, which fits i64");
    if !entries_fit {
        return;
    }
    let rep = MappingClassElement::new(m[0] as i64, m[1] as i64, m[2] as i64, m[3] as i64)
        .expect("cycle matrices are unimodular");
    found.push((
        key.clone(),
        ClosedGeodesicClass {
            trace: tr as i64,
            length: 2.0 * ((tr as f64) / 2.0).acosh(),
            representative: rep,
            primitive: true,
            cf_period: key,
            simple: None,
        },
    ));
}

/// Purely periodic two-sided value of a digit cycle: the attracting
/// fixed point α = [a₁; a₂, a₃, …] of its matrix (α > 1).
fn periodic_cf_value(digits: &[u32]) -> f64 {
    let m = cycle_matrix(digits).expect("height cycles are small");
    let (a, b, c, d) = (m[0] as f64, m[1] as f64, m[2] as f64, m[3] as f64);
    let tr = a + d;
    let disc = (tr * tr - 4.0).sqrt();
    debug_assert!(c > 0.0 && b > 0.0, "positive words have positive entries");
    (a - d + disc) / (2.0 * c)
}

/// Apex height of the class axis over the quotient: the maximum over
/// all rotations i of (αᵢ + 1/γᵢ)/2, with αᵢ the forward value at that
/// rotation and γᵢ the backward value (reversed digits).
pub fn axis_height(cf_period: &[u32]) -> f64 {
    let k = cf_period.len();
    let mut best = 0.0f64;
    for i in 0..k {
        let fwd: Vec<u32> = (0..k).map(|j| cf_period[(i + j) % k]).collect();
        let rev: Vec<u32> = (0..k).map(|j| cf_period[(i + k - 1 - j) % k]).collect();
        let alpha = periodic_cf_value(&fwd);
        let gamma = periodic_cf_value(&rev);
        best = best.max((alpha + 1.0 / gamma) / 2.0);
    }
    best
}

/// Height ceiling for digit-bounded cycles: with u = (N + √(N² + 4N))/2
/// (the value of the alternating extremal word [N; 1, N, 1, …]), no axis
/// with digits ≤ N tops u(u + 2)/(2(u + 1)).
pub fn height_bound(n: u32) -> f64 {
    let nf = n as f64;
    let u = (nf + (nf * nf + 4.0 * nf).sqrt()) / 2.0;
    u * (u + 2.0) / (2.0 * (u + 1.0))
}

/// Least-squares fit of log N(T) over a window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub residual_rms: f64,
    /// (T, log N(T)) points used.
    pub points: Vec<(f64, f64)>,
}

/// Fits the exponential growth exponent of the counting function on
/// [t0, t1], using each census jump inside the window as a data point.
pub fn growth_rate_fit(census: &CensusTable, window: (f64, f64)) -> Result<GrowthFit> {
    let (t0, t1) = window;
    if !(t0.is_finite() && t1.is_finite() && t0 < t1) {
        return Err(Error::Config {
            field: "window".into(),
            reason: format!("need finite t0 < t1, got [{t0}, {t1}]"),
        });
    }
    if t1 > census.t_max + 1e-9 {
        return Err(Error::Config {
            field: "window".into(),
            reason: format!("window end {t1} beyond census cutoff {}", census.t_max),
        });
    }
    if census.n_at(t1) < 50 {
        return Err(Error::InsufficientData {
            reason: format!("need N(t1) ≥ 50, census has {}", census.n_at(t1)),
        });
    }
    let points: Vec<(f64, f64)> = census
        .counts
        .iter()
        .filter(|&&(t, _)| t >= t0 && t <= t1)
        .map(|&(t, n)| (t, (n as f64).ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientData {
            reason: format!("only {} census jumps inside the window", points.len()),
        });
    }
    let n = points.len() as f64;
    let tbar = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ybar = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - tbar).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - tbar) * (p.1 - ybar)).sum();
    let slope = sxy / sxx;
    let intercept = ybar - slope * tbar;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum();
    let stderr = (ss_res / (n - 2.0) / sxx).sqrt();
    Ok(GrowthFit {
        slope,
        intercept,
        stderr,
        residual_rms: (ss_res / n).sqrt(),
        points,
    })
}
