//! Digit-bounded subshifts and their closed-orbit censuses.
//!
//! Restricting continued-fraction digits to {1, …, N} cuts a compact,
//! flow-invariant piece out of the unit tangent bundle: the digit
//! sequences form the full shift on N symbols, whose topological
//! entropy is the logarithm of the spectral radius of the transition
//! matrix. Closed geodesics inside the piece are exactly the primitive
//! digit cycles with entries ≤ N, so their counts per period must obey
//! the same growth rate, and their axes stay below the closed-form
//! height ceiling of [`height_bound`](super::census::height_bound).
//!
//! Periodic-point counts are traces of exact integer matrix powers; the
//! class census per period is tied to them by the necklace identity
//! N^k = Σ_{c | k/2} c·(classes of digit-period 2c), which the tests
//! check digit for digit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectrum::census::{
    axis_height, canonical_even_rotation, ClosedGeodesicClass,
};

/// A digit-bounded shift with its transition structure and entropy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubshiftSpec {
    /// Digits range over {1, …, digit_bound}.
    pub digit_bound: u32,
    /// 0/1 transition matrix on the digit alphabet.
    pub adjacency: Vec<Vec<u8>>,
    /// log of the spectral radius of `adjacency`.
    pub entropy: f64,
}

/// The full shift on digits {1, …, n}: every digit may follow every
/// digit, entropy log n via power iteration on the transition matrix.
pub fn bounded_cf_subshift(n: u32) -> Result<SubshiftSpec> {
    if n < 1 {
        return Err(Error::Config {
            field: "digit_bound".into(),
            reason: "the digit alphabet needs at least the digit 1".into(),
        });
    }
    let size = n as usize;
    let adjacency = vec![vec![1u8; size]; size];
    let radius = spectral_radius(&adjacency)?;
    Ok(SubshiftSpec {
        digit_bound: n,
        adjacency,
        entropy: radius.ln(),
    })
}

/// Power iteration on a non-negative 0/1 matrix with at least one cycle.
fn spectral_radius(adjacency: &[Vec<u8>]) -> Result<f64> {
    let size = adjacency.len();
    let mut v = vec![1.0f64; size];
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let mut next = vec![0.0f64; size];
        for (i, row) in adjacency.iter().enumerate() {
            for (j, &e) in row.iter().enumerate() {
                if e != 0 {
                    next[i] += v[j];
                }
            }
        }
        let norm = next.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InsufficientData {
                reason: "transition matrix is nilpotent: no closed orbits".into(),
            });
        }
        for x in &mut next {
            *x /= norm;
        }
        let estimate = norm;
        let done = (estimate - lambda).abs() <= 1e-14 * estimate.max(1.0);
        lambda = estimate;
        v = next;
        if done {
            return Ok(lambda);
        }
    }
    Ok(lambda)
}

impl SubshiftSpec {
    /// Number of period-k points: trace of the k-th power of the
    /// transition matrix, exact in 128-bit integers.
    pub fn periodic_count(&self, k: u32) -> Result<i128> {
        if k == 0 {
            return Err(Error::Config {
                field: "k".into(),
                reason: "periods start at 1".into(),
            });
        }
        let size = self.adjacency.len();
        let mut power: Vec<Vec<i128>> = (0..size)
            .map(|i| (0..size).map(|j| i128::from(i == j)).collect())
            .collect();
        let base: Vec<Vec<i128>> = self
            .adjacency
            .iter()
            .map(|row| row.iter().map(|&e| e as i128).collect())
            .collect();
        for _ in 0..k {
            power = mat_mul(&power, &base)?;
        }
        let mut tr = 0i128;
        for (i, row) in power.iter().enumerate() {
            tr = tr.checked_add(row[i]).ok_or(Error::Overflow)?;
        }
        Ok(tr)
    }
}

fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let size = a.len();
    let mut out = vec![vec![0i128; size]; size];
    for i in 0..size {
        for j in 0..size {
            let mut acc = 0i128;
            for (l, bl) in b.iter().enumerate() {
                acc = acc
                    .checked_add(a[i][l].checked_mul(bl[j]).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
            out[i][j] = acc;
        }
    }
    Ok(out)
}

/// Closed geodesics confined to the digit-bounded piece.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HorseshoeCensus {
    pub digit_bound: u32,
    /// Largest digit-cycle period enumerated (even).
    pub k_max: usize,
    /// Canonical primitive classes, sorted by (period, cf_period).
    pub classes: Vec<ClosedGeodesicClass>,
    pub entropy: f64,
}

impl HorseshoeCensus {
    /// Number of classes whose cycle has exactly this digit period.
    pub fn count_with_period(&self, k: usize) -> usize {
        self.classes.iter().filter(|c| c.cf_period.len() == k).count()
    }

    /// Periodic digit words of length k (k even ≤ k_max), reconstructed
    /// from the class census through the necklace identity.
    pub fn periodic_points(&self, k: usize) -> Result<i128> {
        if k == 0 || k % 2 != 0 || k > self.k_max {
            return Err(Error::Config {
                field: "k".into(),
                reason: format!("need an even period within 2..={}, got {k}", self.k_max),
            });
        }
        let pairs = k / 2;
        let mut total = 0i128;
        for c in 1..=pairs {
            if pairs % c == 0 {
                let classes = self.count_with_period(2 * c) as i128;
                total = total
                    .checked_add((c as i128).checked_mul(classes).ok_or(Error::Overflow)?)
                    .ok_or(Error::Overflow)?;
            }
        }
        Ok(total)
    }

    /// Largest axis apex height among the classes.
    pub fn max_axis_height(&self) -> Option<f64> {
        self.classes
            .iter()
            .map(|c| axis_height(&c.cf_period))
            .fold(None, |acc, h| Some(acc.map_or(h, |a: f64| a.max(h))))
    }
}

/// All primitive classes with digits ≤ n and digit period ≤ k_max,
/// enumerated exhaustively (each class once, canonical key).
pub fn closed_geodesics_in_horseshoe(n: u32, k_max: usize) -> Result<HorseshoeCensus> {
    if n < 1 {
        return Err(Error::Config {
            field: "digit_bound".into(),
            reason: "the digit alphabet needs at least the digit 1".into(),
        });
    }
    if k_max < 2 {
        return Err(Error::Config {
            field: "k_max".into(),
            reason: "digit cycles have period at least 2".into(),
        });
    }
    let mut budget: u128 = 0;
    let mut k = 2usize;
    while k <= k_max {
        budget = budget.saturating_add((n as u128).saturating_pow(k as u32));
        k += 2;
    }
    if budget > 50_000_000 {
        return Err(Error::Config {
            field: "k_max".into(),
            reason: format!(
                "exhaustive enumeration would visit {budget} words; shrink the digit bound or period"
            ),
        });
    }
    let entropy = bounded_cf_subshift(n)?.entropy;
    let mut classes = Vec::new();
    let mut k = 2usize;
    while k <= k_max {
        let total = (n as u64).pow(k as u32);
        let mut digits = vec![1u32; k];
        for idx in 0..total {
            let mut rest = idx;
            for d in digits.iter_mut() {
                *d = (rest % n as u64) as u32 + 1;
                rest /= n as u64;
            }
            if !pair_primitive(&digits) {
                continue;
            }
            if canonical_even_rotation(&digits) != digits {
                continue;
            }
            classes.push(class_from_cycle(&digits)?);
        }
        k += 2;
    }
    classes.sort_by(|a, b| {
        a.cf_period
            .len()
            .cmp(&b.cf_period.len())
            .then_with(|| a.cf_period.cmp(&b.cf_period))
    });
    Ok(HorseshoeCensus {
        digit_bound: n,
        k_max,
        classes,
        entropy,
    })
}

fn pair_primitive(digits: &[u32]) -> bool {
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

fn class_from_cycle(digits: &[u32]) -> Result<ClosedGeodesicClass> {
    let mut m = [1i128, 0, 0, 1];
    for (i, &a) in digits.iter().enumerate() {
        let a = a as i128;
        m = if i % 2 == 0 {
            [
                m[0],
                m[0].checked_mul(a).and_then(|x| x.checked_add(m[1])).ok_or(Error::Overflow)?,
                m[2],
                m[2].checked_mul(a).and_then(|x| x.checked_add(m[3])).ok_or(Error::Overflow)?,
            ]
        } else {
            [
                m[0].checked_add(m[1].checked_mul(a).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?,
                m[1],
                m[2].checked_add(m[3].checked_mul(a).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?,
                m[3],
            ]
        };
    }
    let tr = m[0].checked_add(m[3]).ok_or(Error::Overflow)?;
    let fits = m.iter().all(|&e| e >= i64::MIN as i128 && e <= i64::MAX as i128);
    if !fits {
        return Err(Error::Overflow);
    }
    let rep = crate::hyp::MappingClassElement::new(m[0] as i64, m[1] as i64, m[2] as i64, m[3] as i64)
        .expect("digit-cycle matrices are unimodular");
    Ok(ClosedGeodesicClass {
        trace: tr as i64,
        length: 2.0 * ((tr as f64) / 2.0).acosh(),
        representative: rep,
        primitive: true,
        cf_period: digits.to_vec(),
        simple: None,
    })
}
