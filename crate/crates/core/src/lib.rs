//! Exact-arithmetic kernels for re-running the computer-assisted proof that
//! no singular modulus is an algebraic unit.
//!
//! Everything here is pure computation over integers and rationals and only
//! needs `alloc`. File formats, the command-line driver and the parallel
//! drivers live in the `singular-units` crate.
//!
//! Module map:
//!
//! * [`arith`]: factorization, ω/σ₀/σ₁, quadratic gcd, sieves, Robin's constant.
//! * [`forms`]: discriminants, reduced forms, class numbers, exact C_ε counts.
//! * [`interval`]: outward-rounded rational enclosures and named constants.
//! * [`dyadic`]: fixed-point enclosures for the hot streaming loops.
//! * [`bounds`]: closed-form C_ε and height bounds.
//! * [`cert`]: the analytic range certificates.
//! * [`sd`]: the S(x) error constants and σ-extremes.
//! * [`scan`]: blocked counting of near-corner triples.
//! * [`exclude`]: norm lower bounds for the remaining discriminants.
//! * [`jnum`]: non-certified numerics for Klein's j (oracle only).
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod arith;
pub mod bounds;
pub mod cert;
pub mod dyadic;
mod error;
pub mod exclude;
pub mod forms;
pub mod interval;
pub mod jnum;
pub mod scan;
pub mod sd;

pub use error::{Error, Result};
pub use interval::Enclosure;

/// Exact rational numbers used for all certified endpoints.
pub type Rational = num_rational::BigRational;
