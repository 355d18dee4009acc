//! Binary digit sums along arithmetic progressions.
//!
//! Every integer tuple `(k_1, ..., k_m)` occurs as
//! `k_l = s2(n + l*t) - s2(n)` for some explicit pair `(n, t)`, where `s2` is
//! the number of ones in the binary expansion. This crate constructs such
//! witnesses, computes the exact asymptotic laws of the differences (one- and
//! multi-dimensional), and cross-validates everything against brute-force
//! enumeration.
//!
//! Module map:
//! - [`digits`] — elementary digit functions on unbounded integers;
//! - [`dyadic`] — exact dyadic rationals, the value space of all densities;
//! - [`witness`] — constructive realization of difference tuples and
//!   Thue-Morse words;
//! - [`density1d`] — exact one-dimensional laws with closed-form geometric
//!   tails;
//! - [`densitymd`] — truncated joint laws with certified lost-mass bounds;
//! - [`oracle`] — brute-force counting, witness verification, period
//!   detection;
//! - [`analysis`] — scans, moment reports, CSV/JSON export.

pub mod analysis;
pub mod density1d;
pub mod densitymd;
pub mod digits;
pub mod dyadic;
pub mod oracle;
mod par;
pub mod witness;

pub use dyadic::DyadicRational;
pub use num_bigint::{BigInt, BigUint};
