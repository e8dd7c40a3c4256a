//! Exact arithmetic for Markoff-type K3 surfaces.
//!
//! The crate covers p-adic arithmetic and Hensel lifting, Hilbert symbols,
//! the three symmetric surface families, local solvability certificates,
//! Brauer-Manin invariant computations, the rank-18 Picard lattice with its
//! Galois cohomology, Frobenius point counts over small finite fields and a
//! parameter census.

pub mod arith;
pub mod brauer;
pub mod census;
pub mod frobenius;
pub mod hilbert;
pub mod lattice;
pub mod linalg;
pub mod padic;
pub mod poly;
pub mod surfaces;
pub mod local_points;
pub mod scan;

use num_rational::BigRational;
use serde::Serializer;

/// Serialize a rational as its decimal `n` or `n/d` string.
pub fn serialize_rational<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}
