//! Zero-leakage variable-length coding over finite alphabets.
//!
//! Given a joint distribution of a private variable `X` and a useful variable
//! `Y`, this crate
//!
//! * computes information measures and the leakage kernel `P(X|Y)`,
//! * synthesizes a perfectly private disclosure variable `U` (the privacy
//!   funnel at zero leakage) by enumerating the vertices of the polytope
//!   `{p >= 0 : P(X|Y) p = P(X)}` and solving a small linear program,
//! * brackets the minimum optimizer entropy with two further linear programs,
//! * builds executable private codes (one-time-padded private part plus a
//!   prefix code for `U`, or a direct pad of `Y` when `|Y| <= |X|`), and
//! * audits them by exact enumeration.
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command line live in the `privlen` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod codec;
pub mod dist;
mod error;
pub mod linalg;
pub mod lp;
pub mod mechanism;
mod tol;

pub use error::Error;
pub use tol::Tolerances;

#[cfg(test)]
pub(crate) mod testutil;

pub type Result<T, E = Error> = core::result::Result<T, E>;
