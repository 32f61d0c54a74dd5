//! Crate-wide error type.
//!
//! Every fallible operation returns [`Error`]; errors carry enough context
//! to be actionable (which invariant failed, the best iterate reached, the
//! attained value against the budget) without holding references into the
//! inputs.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point of the open upper half-plane requires y > 0.
    #[error("point ({x}, {y}) is outside the open upper half-plane")]
    InvalidPoint { x: f64, y: f64 },

    /// A length/twist chart point requires ell > 0.
    #[error("length coordinate {ell} is not positive")]
    InvalidLengthCoord { ell: f64 },

    /// Integer 2x2 matrices must have determinant exactly 1.
    #[error("matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1")]
    NotUnimodular { a: i64, b: i64, c: i64, d: i64, det: i64 },

    /// Integer matrix arithmetic left the i64 range.
    #[error("integer overflow in matrix arithmetic")]
    Overflow,

    /// Two coincident endpoints admit no connecting geodesic.
    #[error("degenerate chord: endpoints coincide")]
    DegenerateChord,

    /// Tangent-angle comparison requires a common base point.
    #[error("tangent base points differ by {gap:.3e}, beyond tolerance")]
    BaseMismatch { gap: f64 },

    /// Triangle data must satisfy the hyperbolic law of cosines (rhs >= 1).
    #[error("no hyperbolic triangle realizes these angles (cosh rhs = {rhs})")]
    InvalidTriangle { rhs: f64 },

    /// Fundamental-domain reduction exceeded its iteration cap.
    #[error("fundamental-domain reduction did not terminate in {cap} steps")]
    NonTermination { cap: usize },

    /// A chart point lies outside the backend's declared domain.
    #[error("chart point ({c1}, {c2}) is outside the backend domain")]
    OutsideChart { c1: f64, c2: f64 },

    /// The adaptive integrator's step fell below its floor.
    #[error("integrator step underflow at arclength {s:.6}")]
    StepUnderflow { s: f64 },

    /// The boundary-value solver stalled; carries its best residual.
    #[error("chord solver did not converge: endpoint error {endpoint_error:.3e} after {iterations} iterations")]
    NoConvergence { endpoint_error: f64, iterations: u32 },

    /// Every candidate initial direction ran into cusp termination.
    #[error("chord solver obstructed: all shooting directions terminate at the cusp")]
    CuspObstruction,

    /// Consecutive concatenation segments must share an endpoint.
    #[error("segment {index} ends {gap:.3e} away from the start of segment {next}", next = index + 1)]
    EndpointMismatch { index: usize, gap: f64 },

    /// Both geodesics fed to the splice must end at the same cusp.
    #[error("geodesics end at different cusps")]
    CuspMismatch,

    /// A splice could not meet its exterior-angle budget within the twist cap.
    #[error("splice {step}: best exterior angle {achieved:.3e} exceeds budget {budget:.3e} at twist cap {cap}")]
    AngleBudgetInfeasible { step: usize, achieved: f64, budget: f64, cap: i64 },

    /// A construction plan violated one of its declared invariants.
    #[error("invalid plan: {reason}")]
    InvalidPlan { reason: String },

    /// The exterior-angle bound function is defined for 0 <= ea <= 1/2.
    #[error("exterior-angle total {ea} is outside [0, 1/2]")]
    EaOutOfRange { ea: f64 },

    /// Nearest-point projection failed (degenerate data near the chart edge).
    #[error("nearest-point projection failed: {reason}")]
    ProjectionFailure { reason: String },

    /// A statistical fit had too few points to be meaningful.
    #[error("insufficient data: {reason}")]
    InsufficientData { reason: String },

    /// An experiment configuration field failed validation.
    #[error("config error at `{field}`: {reason}")]
    Config { field: String, reason: String },
}
