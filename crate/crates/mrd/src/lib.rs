//! Exact arithmetic for Riordan-style arrays.
//!
//! Everything in this crate works over arbitrary-precision rationals; no
//! floating point is used anywhere. The building blocks are truncated formal
//! power series ([`series::Series`]) with explicit truncation bookkeeping,
//! on top of which sit:
//!
//! * a small expression language for writing generating functions
//!   ([`gfexpr`]),
//! * classical Riordan arrays, both triangular ("proper") and square
//!   ("type") flavours, with their group operations and A/Z-sequence
//!   characterizations ([`riordan`]),
//! * multiple Riordan arrays with `ell` multiplier functions, their group
//!   law, sequence characterizations, production matrices and
//!   decompositions ([`multiriordan`]),
//! * array compression and exhaustive finite total-positivity /
//!   Polya-frequency certification ([`compress`]),
//! * a harness of combinatorial identity checks (Stirling/umbral sums,
//!   Fuss-Catalan expansions) evaluated exactly over parameter grids
//!   ([`identities`]).
//!
//! The `mrd` binary exposes all of it on the command line with text, CSV
//! and JSON output.

pub mod compress;
pub mod gfexpr;
pub mod identities;
pub mod matrix;
pub mod multiriordan;
pub mod rational;
pub mod riordan;
pub mod series;
#[cfg(test)]
pub(crate) mod testkit;

pub use compress::{CompressError, CompressedSpec, TPReport, TPVerdict};
pub use identities::{IdentityError, IdentityReport, Stirling2Table};
pub use matrix::RationalMatrix;
pub use multiriordan::{MultiRiordanError, MultiRiordanSpec, ProductionMatrix, SeqChar};
pub use rational::Rational;
pub use riordan::{RiordanKind, RiordanSpec};
pub use series::{GradedSeries, Series, SeriesError};
