//! Exact combinatorial machinery for monochromatic subset sums.
//!
//! Given a coloring of `{1..=N}` with `t` classes, a *witness* is a sequence
//! `a_1..a_n` whose every nonempty-subset sum lies in one class. This crate
//! provides:
//!
//! * verification and transformation of witnesses ([`coloring`]);
//! * the alternating-sum algebra and the block construction that realizes
//!   witness sums as alternating sums of single sets ([`altsum`]);
//! * desk-scale Ramsey search, iterated witnesses over subset colorings,
//!   recursive bounds, and the size-membership counterexample ([`ramsey`]);
//! * exact computation of the minimal forcing length `J(t, n)` by canonical
//!   backtracking, with extremal certificates ([`numbers`]);
//! * end-to-end witness extraction with machine-checkable certificates
//!   ([`extract`]).
//!
//! Everything is exhaustive or certificate-checked; no value is reported
//! that was not computed.

pub mod altsum;
pub mod coloring;
pub mod extract;
pub mod numbers;
pub mod ramsey;
pub mod report;
pub mod set;

mod bits;
mod comb;
mod search;

pub use coloring::{ClassId, GroundColoring, SumsetWitness};
pub use set::FiniteSet;
