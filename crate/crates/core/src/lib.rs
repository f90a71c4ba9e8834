//! Identities between multiple zeta star values, organised around block
//! decompositions of binary words.
//!
//! The library has three layers:
//!
//! * **Combinatorial** — binary words bounded by `0…1`, their decomposition
//!   into maximal alternating blocks ([`word`]), signed index arithmetic and
//!   the two-one rewriting of star values into alternating double-cover sums
//!   ([`signed_index`]), and set-partition machinery with exact rational
//!   coefficients ([`partitions`]).
//! * **Formal** — sums of zeta monomials with exact rational coefficients
//!   ([`formal`]): the symmetrised block identity is produced here as an
//!   [`formal::IdentityCertificate`] relating a permutation sum of star
//!   values to a short polynomial in single zeta values and `ζ*({2}^m)`.
//! * **Numeric** — two independent high-precision evaluators plus a slow
//!   direct-summation oracle ([`eval`]), used to verify certificates to a
//!   requested tolerance with explicit error bounds.
//!
//! The `zeta-blocks` binary exposes the same functionality as a command line
//! tool (`decompose`, `identity`, `selftest`).

pub mod eval;
pub mod formal;
pub mod partitions;
pub mod real;
pub mod selftest;
pub mod signed_index;
pub mod word;

use thiserror::Error;

/// Errors reported by the combinatorial and numeric layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("input must be nonempty")]
    Empty,
    #[error("block operations require the word to start with 0")]
    LeadingOne,
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("index entries must be positive")]
    NonPositiveEntry,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("step rule is only defined for appended entries 1, 2, 3 (got {0})")]
    UnsupportedStep(u32),
    #[error("budget exceeded: {what} is limited to {limit}, got {got}")]
    Budget {
        what: &'static str,
        limit: usize,
        got: usize,
    },
    #[error("identity requires every block length ≥ 2")]
    BlockLengthTooSmall,
    #[error("divergent index: {0}")]
    Divergent(String),
    #[error("invalid evaluation context: {0}")]
    InvalidContext(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
