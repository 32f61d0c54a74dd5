//! Dense chordal limits: chains of spliced cusp geodesics and the
//! tangents their chords accumulate on.
//!
//! A plan fixes a sequence of cusp-to-cusp geodesics; the chain
//! construction splices consecutive ones inside shared horoball
//! neighborhoods, with integer twisting spreading the splice wide enough
//! to meet a per-vertex exterior-angle budget. Because consecutive
//! frames are related by integer Möbius steps, all cross-frame
//! bookkeeping (chord geometry, horoball images, junction identities)
//! is carried in exact arithmetic and rendered to f64 only inside a
//! single well-conditioned frame at a time; this is what lets chains
//! dozens of splices deep be measured at ordinary double precision.
//!
//! The payoff experiments: non-degeneration certificates (the chain
//! stays clear of every foreign cusp neighborhood), nested chordal
//! limits (chords between symmetric midpoints converge to a limiting
//! tangent, certified by decreasing Cauchy gaps), and tangent-bundle
//! coverage (folded chord tangents fill out a grid on the unit tangent
//! bundle as chains deepen).

pub mod bigmat;
pub mod chain;
pub mod degen;
pub mod limit;
pub mod plan;

pub use bigmat::{BigMoebius, BigRat, ExactGeo, Horoball};
pub use chain::{
    build_concatenation, chord_frames, BuiltConcatenation, ChordFrames, ChordInFrame,
    MidpointInfo, Piece, PieceKind,
};
pub use degen::{check_no_degeneration, nested_pairs, DegenerationReport};
pub use limit::{
    bundle_grid_cells, chord_tangent_samples, chordal_limit, density_coverage, ChordStat,
    ChordalLimit,
};
pub use plan::{
    base_direction, center_symmetric_budget, singular_geodesic_sequence, ConcatenationPlan,
};
