//! Computational toolkit for triangles of Baumslag-Solitar groups.
//!
//! A triangle of Baumslag-Solitar groups `G(a,b;c,d;e,f)` is the group
//!
//! ```text
//! < x, y, z | (x^a)^y = x^b,  (y^c)^z = y^d,  (z^e)^x = z^f >
//! ```
//!
//! with conjugation written `u^v = v^-1 u v` and all six parameters nonzero.
//! The crate decides when such a triangle is developable (i.e. is the
//! fundamental group of a developable triangle of groups), builds and
//! analyzes its universal finite-order quotients, and verifies the collapse
//! relations and order bounds that drive those decisions.
//!
//! The crate is `no_std`-compatible (requires `alloc`). The default `std`
//! feature enables wall-clock enforcement of enumeration time budgets.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod arith;
pub mod coset;
pub mod decide;
pub mod structure;
pub mod triangle;
pub mod word;

pub use num_bigint::BigInt;
