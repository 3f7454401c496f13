//! Numerical core for chordal Loewner evolution on lattice domains.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, threads or the command line lives in the companion crate
//! `conflimit-lab`.
//!
//! Points of the plane are represented as [`Point`] (a `Complex64`), so the
//! conformal maps read the way they are usually written down.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod conformal;
pub mod curves;
pub mod error;
pub mod geom;
pub mod lattice;
pub mod linalg;
pub mod loewner;
pub mod stochastic;

pub use error::{Error, Result};

/// A point of the complex plane.
pub type Point = num_complex::Complex64;

/// Shorthand for building a [`Point`].
#[inline]
pub const fn pt(x: f64, y: f64) -> Point {
    Point::new(x, y)
}
