//! Simple closed geodesics on the square once-punctured torus.
//!
//! The square punctured torus is the four-fold-symmetric point of the
//! moduli space: generators with traces (2√2, 2√2, 4) and parabolic
//! commutator. Its holonomy lives in SL(2, Z[√2]), so every word in the
//! generators is computed exactly as a matrix of a + b√2 entries.
//! Simple closed curves are classified by their slope p/q; the matrix
//! of a slope is the Stern-Brocot concatenation W(mediant) = W(left)·
//! W(right), which realizes the trace recursion
//! tr(W_mediant) = tr(W_left)·tr(W_right) − tr(W_third) and keeps every
//! Farey triangle of traces (x, y, z) on the Markov-type surface
//! x² + y² + z² = xyz.
//!
//! Heights are cusp excursions: conjugating so that the commutator
//! fixes ∞ with unit translation, the apex of a hyperbolic axis is half
//! the gap between its endpoints, maximized over cyclic rotations of
//! the word. Simple classes stay under a uniform apex height; words
//! with mixed generator signs dive past it, which is the contrast the
//! census experiments report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp::{ExtendedReal, RealMoebius};

/// An element a + b√2 of the real quadratic ring used by the holonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zr2 {
    pub a: i128,
    pub b: i128,
}

impl Zr2 {
    pub const ZERO: Zr2 = Zr2 { a: 0, b: 0 };
    pub const ONE: Zr2 = Zr2 { a: 1, b: 0 };

    fn add(self, o: Zr2) -> Result<Zr2> {
        Ok(Zr2 {
            a: self.a.checked_add(o.a).ok_or(Error::Overflow)?,
            b: self.b.checked_add(o.b).ok_or(Error::Overflow)?,
        })
    }

    fn mul(self, o: Zr2) -> Result<Zr2> {
        let aa = self.a.checked_mul(o.a).ok_or(Error::Overflow)?;
        let bb = self.b.checked_mul(o.b).ok_or(Error::Overflow)?;
        let ab = self.a.checked_mul(o.b).ok_or(Error::Overflow)?;
        let ba = self.b.checked_mul(o.a).ok_or(Error::Overflow)?;
        Ok(Zr2 {
            a: aa.checked_add(bb.checked_mul(2).ok_or(Error::Overflow)?).ok_or(Error::Overflow)?,
            b: ab.checked_add(ba).ok_or(Error::Overflow)?,
        })
    }

    pub fn value(self) -> f64 {
        self.a as f64 + self.b as f64 * std::f64::consts::SQRT_2
    }
}

/// Exact 2×2 matrix over Z[√2], row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusMatrix(pub [Zr2; 4]);

impl TorusMatrix {
    fn mul(&self, o: &TorusMatrix) -> Result<TorusMatrix> {
        let a = &self.0;
        let b = &o.0;
        Ok(TorusMatrix([
            a[0].mul(b[0])?.add(a[1].mul(b[2])?)?,
            a[0].mul(b[1])?.add(a[1].mul(b[3])?)?,
            a[2].mul(b[0])?.add(a[3].mul(b[2])?)?,
            a[2].mul(b[1])?.add(a[3].mul(b[3])?)?,
        ]))
    }

    pub fn trace(&self) -> Result<Zr2> {
        self.0[0].add(self.0[3])
    }

    fn to_f64(self) -> [f64; 4] {
        [
            self.0[0].value(),
            self.0[1].value(),
            self.0[2].value(),
            self.0[3].value(),
        ]
    }
}

/// Generator letters and their inverses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TorusLetter {
    A,
    AInv,
    B,
    BInv,
}

fn letter_matrix(letter: TorusLetter) -> TorusMatrix {
    let r2 = Zr2 { a: 0, b: 1 };
    let one = Zr2::ONE;
    let neg_one = Zr2 { a: -1, b: 0 };
    match letter {
        // [[√2, 1], [1, √2]]: axis the unit semicircle.
        TorusLetter::A => TorusMatrix([r2, one, one, r2]),
        TorusLetter::AInv => TorusMatrix([r2, neg_one, neg_one, r2]),
        // [[1+√2, 0], [0, √2−1]]: axis the imaginary axis.
        TorusLetter::B => {
            TorusMatrix([Zr2 { a: 1, b: 1 }, Zr2::ZERO, Zr2::ZERO, Zr2 { a: -1, b: 1 }])
        }
        TorusLetter::BInv => {
            TorusMatrix([Zr2 { a: -1, b: 1 }, Zr2::ZERO, Zr2::ZERO, Zr2 { a: 1, b: 1 }])
        }
    }
}

pub fn word_matrix(word: &[TorusLetter]) -> Result<TorusMatrix> {
    let mut m = TorusMatrix([Zr2::ONE, Zr2::ZERO, Zr2::ZERO, Zr2::ONE]);
    for &l in word {
        m = m.mul(&letter_matrix(l))?;
    }
    Ok(m)
}

/// One simple closed curve, keyed by its slope.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimpleClass {
    /// Slope (p, q) in lowest terms; (1, 0) is the second generator.
    pub slope: (u32, u32),
    pub word: Vec<TorusLetter>,
    pub trace_exact: Zr2,
    pub trace: f64,
    pub length: f64,
    /// Cusp-normalized apex height of the axis, maximized over rotations.
    pub height: f64,
}

/// Census of simple classes up to a denominator cap.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimpleCensus {
    pub q_max: u32,
    /// Sorted by (q, p).
    pub classes: Vec<SimpleClass>,
    /// Largest apex height among the classes: the uniform bound the
    /// simple family obeys and non-simple words break.
    pub h_star: f64,
}

/// The cusp normalizer: a real Möbius map sending the commutator fixed
/// point to ∞ and scaling its translation length to 1.
fn cusp_normalizer() -> Result<RealMoebius> {
    let a = letter_matrix(TorusLetter::A);
    let b = letter_matrix(TorusLetter::B);
    let ai = letter_matrix(TorusLetter::AInv);
    let bi = letter_matrix(TorusLetter::BInv);
    let comm = a.mul(&b)?.mul(&ai)?.mul(&bi)?;
    let tr = comm.trace()?;
    debug_assert!(tr == Zr2 { a: -2, b: 0 }, "commutator is parabolic");
    let m = comm.to_f64();
    // Parabolic fixed point, then z ↦ 1/(z* − z)-type flip to ∞.
    let zstar = (m[0] - m[3]) / (2.0 * m[2]);
    let t = [0.0, 1.0, -1.0, zstar];
    let tinv = [zstar, -1.0, 1.0, 0.0];
    let conj = mat4_mul(mat4_mul(t, m), tinv);
    let tau = conj[1] / conj[0];
    let s = 1.0 / tau.abs().sqrt();
    RealMoebius::new(0.0, s, -1.0 / s, zstar / s)
}

fn mat4_mul(a: [f64; 4], b: [f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// Apex height of the axis of a hyperbolic matrix, in the normalized
/// cusp coordinates; +∞ when an endpoint lands on the cusp itself.
fn apex_height(m: [f64; 4], norm: &RealMoebius) -> f64 {
    let tr = m[0] + m[3];
    let disc = tr * tr - 4.0;
    if disc <= 0.0 {
        return 0.0;
    }
    let root = disc.sqrt();
    let (e1, e2) = if m[2].abs() > 1e-300 {
        (
            ExtendedReal::Finite((m[0] - m[3] + root) / (2.0 * m[2])),
            ExtendedReal::Finite((m[0] - m[3] - root) / (2.0 * m[2])),
        )
    } else {
        (ExtendedReal::Infinity, ExtendedReal::Finite(m[1] / (m[3] - m[0])))
    };
    match (norm.apply_extended(e1), norm.apply_extended(e2)) {
        (ExtendedReal::Finite(x1), ExtendedReal::Finite(x2)) => (x1 - x2).abs() / 2.0,
        _ => f64::INFINITY,
    }
}

/// Largest apex height over cyclic rotations of the word.
pub fn word_axis_height(word: &[TorusLetter]) -> Result<f64> {
    let norm = cusp_normalizer()?;
    let mut best = 0.0f64;
    for start in 0..word.len() {
        let rotated: Vec<TorusLetter> =
            (0..word.len()).map(|i| word[(start + i) % word.len()]).collect();
        let m = word_matrix(&rotated)?;
        best = best.max(apex_height(m.to_f64(), &norm));
    }
    Ok(best)
}

/// All simple classes with slope denominator ≤ q_max (slopes taken in
/// [0, 1] by the square symmetry, plus the second generator 1/0).
pub fn simple_geodesic_census(q_max: u32) -> Result<SimpleCensus> {
    if q_max < 1 {
        return Err(Error::Config {
            field: "q_max".into(),
            reason: "the census needs q_max ≥ 1".into(),
        });
    }
    let mut raw: Vec<((u32, u32), Vec<TorusLetter>)> = vec![
        ((0, 1), vec![TorusLetter::A]),
        ((1, 0), vec![TorusLetter::B]),
        ((1, 1), vec![TorusLetter::A, TorusLetter::B]),
    ];
    descend(
        (0, 1),
        &[TorusLetter::A],
        (1, 1),
        &[TorusLetter::A, TorusLetter::B],
        q_max,
        &mut raw,
    );
    raw.sort_by_key(|&((p, q), _)| (q, p));
    let mut classes = Vec::with_capacity(raw.len());
    for ((p, q), word) in raw {
        let m = word_matrix(&word)?;
        let tr = m.trace()?;
        let trace = tr.value();
        classes.push(SimpleClass {
            slope: (p, q),
            trace_exact: tr,
            trace,
            length: 2.0 * (trace.abs() / 2.0).acosh(),
            height: word_axis_height(&word)?,
            word,
        });
    }
    let h_star = classes.iter().map(|c| c.height).fold(0.0f64, f64::max);
    Ok(SimpleCensus { q_max, classes, h_star })
}

fn descend(
    left: (u32, u32),
    left_word: &[TorusLetter],
    right: (u32, u32),
    right_word: &[TorusLetter],
    q_max: u32,
    out: &mut Vec<((u32, u32), Vec<TorusLetter>)>,
) {
    let med = (left.0 + right.0, left.1 + right.1);
    if med.1 > q_max {
        return;
    }
    let mut word = left_word.to_vec();
    word.extend_from_slice(right_word);
    out.push((med, word.clone()));
    descend(left, left_word, med, &word, q_max, out);
    descend(med, &word, right, right_word, q_max, out);
}

/// Heights of a family of non-simple primitive words A·Bᵏ·A⁻¹·B,
/// measured identically to the census classes.
pub fn nonsimple_height_samples(count: usize) -> Result<Vec<(Vec<TorusLetter>, f64, f64)>> {
    let mut out = Vec::with_capacity(count);
    for k in 1..=count {
        let mut word = vec![TorusLetter::A];
        word.extend(std::iter::repeat(TorusLetter::B).take(k));
        word.push(TorusLetter::AInv);
        word.push(TorusLetter::B);
        let m = word_matrix(&word)?;
        let trace = m.trace()?.value();
        let height = word_axis_height(&word)?;
        out.push((word, trace, height));
    }
    Ok(out)
}
