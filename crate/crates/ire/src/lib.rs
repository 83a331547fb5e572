//! Interval rearrangement ensembles (IREs) and rotational interval exchanges.
//!
//! An IRE scheme is a bijection of a doubled alphabet `A x {b, e}`; together
//! with an exact rational length (or endpoint) vector it describes an ensemble
//! of paired intervals, generalizing interval exchange transformations. This
//! crate provides:
//!
//! * [`exact`] — arbitrary-precision rationals plus the two linear-algebra
//!   services everything else reduces to: strict-positivity feasibility of
//!   homogeneous systems and row-space membership.
//! * [`scheme`] — doubled alphabets, permutations, cycle decomposition, twist
//!   numbers, the duality involution, and irreducibility.
//! * [`lengths`] — allowed length/endpoint vectors, positivity, the
//!   rotationality predicate, splittability, and forced-equality tests.
//! * [`induction`] — the four elementary induction steps and their inverses,
//!   interval merging/splitting, and replayable transcripts.
//! * [`canonical`] — reduction of an irreducible rotational interval exchange
//!   to its canonical form, with an exact transcript.
//! * [`circle`] — exact circle rotations, first-return maps onto arc unions,
//!   dual extraction from return times, and realization of rotational
//!   exchanges as first-return maps.
//! * [`cli`] — the scheme text format and the command-line front end.
//!
//! All arithmetic is exact; there is no floating point anywhere in the crate.

pub mod canonical;
pub mod circle;
pub mod cli;
pub mod exact;
pub mod induction;
pub mod lengths;
pub mod scheme;
