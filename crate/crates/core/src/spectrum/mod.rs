//! Length spectrum, symbolic censuses, and recurrence statistics.
//!
//! Four views of the same dynamical fact — that the flow on a cusped
//! quotient carries infinite complexity in bounded regions:
//!
//! - [`census`]: every primitive closed geodesic up to a length cutoff,
//!   enumerated exactly through integer continued-fraction cycles, with
//!   the exponential growth of the counting function measured by fit.
//! - [`subshift`]: the digit-bounded pieces as full shifts; their
//!   entropy from the transition spectral radius, their closed orbits
//!   counted against it, and their axes pinned under the closed-form
//!   cusp-avoidance height.
//! - [`simple`]: the contrasting sparse family — simple closed curves
//!   on the square punctured torus, exact in Z[√2], quadratically many,
//!   uniformly bounded away from the cusp while non-simple words dive
//!   past the bound.
//! - [`recurrence`] and [`area`]: the measure-theoretic side — Monte
//!   Carlo first-return times on the finite-area quotient, and the
//!   linear-in-T cusp strip area against the finite twist-quotient
//!   sector.

pub mod area;
pub mod census;
pub mod recurrence;
pub mod simple;
pub mod subshift;

pub use area::{
    cusp_area_divergence, fundamental_domain_area, CuspAreaRow, WP_MODULI_AREA_REPORTED,
};
pub use census::{
    axis_height, enumerate_closed_geodesics, growth_rate_fit, height_bound,
    shortest_closed_length, CensusTable, ClosedGeodesicClass, GrowthFit,
};
pub use recurrence::{
    liouville_tangent, recurrence_mc, shortest_orbit_return, shortest_orbit_tangent,
    RecurrenceReport, SampleOutcome,
};
pub use simple::{
    nonsimple_height_samples, simple_geodesic_census, word_axis_height, word_matrix,
    SimpleCensus, SimpleClass, TorusLetter, TorusMatrix, Zr2,
};
pub use subshift::{
    bounded_cf_subshift, closed_geodesics_in_horseshoe, HorseshoeCensus, SubshiftSpec,
};
