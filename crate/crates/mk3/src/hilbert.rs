//! Quadratic Hilbert symbols over Q, written additively in {0, 1/2} ⊂ Q/Z.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use thiserror::Error;

use crate::arith::{self, split_valuation};
use crate::padic::{PadicApprox, PadicError, Valuation};

/// A place of Q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Real,
    Prime(u64),
}

/// Errors from place construction and symbol evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HilbertError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse place {0:?}")]
    BadPlace(String),
    #[error("Hilbert symbol needs nonzero arguments")]
    ZeroArgument,
    #[error("p-adic argument is over {found}, symbol requested at {expected}")]
    PrimeMismatch { expected: u64, found: u64 },
    #[error(transparent)]
    Precision(#[from] PadicError),
}

impl Place {
    /// A finite place, checking primality.
    pub fn prime(p: u64) -> Result<Place, HilbertError> {
        if arith::is_prime(p) {
            Ok(Place::Prime(p))
        } else {
            Err(HilbertError::NotPrime(p))
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for Place {
    type Err = HilbertError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "infinity" | "real" | "oo" => Ok(Place::Real),
            _ => {
                let p: u64 = t.parse().map_err(|_| HilbertError::BadPlace(s.to_string()))?;
                Place::prime(p)
            }
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// An element of {0, 1/2} ⊂ Q/Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInvariant(bool);

impl HalfInvariant {
    pub const ZERO: HalfInvariant = HalfInvariant(false);
    pub const HALF: HalfInvariant = HalfInvariant(true);

    pub fn is_zero(self) -> bool {
        !self.0
    }

    pub fn is_half(self) -> bool {
        self.0
    }

    fn from_parity(odd: bool) -> Self {
        HalfInvariant(odd)
    }
}

impl Add for HalfInvariant {
    type Output = HalfInvariant;
    fn add(self, rhs: HalfInvariant) -> HalfInvariant {
        HalfInvariant(self.0 ^ rhs.0)
    }
}

impl std::iter::Sum for HalfInvariant {
    fn sum<I: Iterator<Item = HalfInvariant>>(iter: I) -> Self {
        iter.fold(HalfInvariant::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for HalfInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.0 { "1/2" } else { "0" })
    }
}

impl Serialize for HalfInvariant {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if self.0 { "1/2" } else { "0" })
    }
}

/// Reduce a nonzero rational to an integer in the same square class.
fn square_class_integer(q: &BigRational) -> BigInt {
    q.numer() * q.denom()
}

/// `(u - 1) / 2 mod 2` for an odd integer given modulo 8.
fn eps(u: u64) -> u32 {
    (((u % 8) - 1) / 2 % 2) as u32
}

/// `(u^2 - 1) / 8 mod 2` for an odd integer given modulo 8.
fn omega(u: u64) -> u32 {
    let u = u % 8;
    ((u * u - 1) / 8 % 2) as u32
}

/// Symbol from valuations and unit residues. `u` and `v` are the units of
/// `a` and `b`, reduced modulo `p` (odd) or 8 (for `p = 2`).
fn symbol_from_parts(p: u64, alpha: i64, u: u64, beta: i64, v: u64) -> HalfInvariant {
    let a_odd = alpha.rem_euclid(2) == 1;
    let b_odd = beta.rem_euclid(2) == 1;
    if p == 2 {
        let mut e = eps(u) * eps(v);
        if a_odd {
            e += omega(v);
        }
        if b_odd {
            e += omega(u);
        }
        return HalfInvariant::from_parity(e % 2 == 1);
    }
    let mut e = 0u32;
    if a_odd && b_odd && (p % 4 == 3) {
        e += 1;
    }
    if b_odd && arith::jacobi(u as i128, p) == -1 {
        e += 1;
    }
    if a_odd && arith::jacobi(v as i128, p) == -1 {
        e += 1;
    }
    HalfInvariant::from_parity(e % 2 == 1)
}

fn unit_parts(n: &BigInt, p: u64) -> (i64, u64) {
    let (v, u) = split_valuation(n, p);
    let modulus = if p == 2 { 8 } else { p };
    (v as i64, arith::reduce_big(&u, modulus))
}

/// `(a, b)_v` for nonzero rationals.
pub fn hilbert_symbol(a: &BigRational, b: &BigRational, v: Place) -> Result<HalfInvariant, HilbertError> {
    if a.is_zero() || b.is_zero() {
        return Err(HilbertError::ZeroArgument);
    }
    match v {
        Place::Real => Ok(HalfInvariant::from_parity(a.is_negative() && b.is_negative())),
        Place::Prime(p) => {
            let (alpha, u) = unit_parts(&square_class_integer(a), p);
            let (beta, w) = unit_parts(&square_class_integer(b), p);
            Ok(symbol_from_parts(p, alpha, u, beta, w))
        }
    }
}

/// `(a, b)_v` for nonzero integers.
pub fn hilbert_symbol_int(a: i64, b: i64, v: Place) -> Result<HalfInvariant, HilbertError> {
    hilbert_symbol(&BigRational::from_integer(a.into()), &BigRational::from_integer(b.into()), v)
}

/// `(a, b)_p` with `a` known to finite p-adic precision and `b` exact.
pub fn hilbert_symbol_padic(a: &PadicApprox, b: &BigRational, p: u64) -> Result<HalfInvariant, HilbertError> {
    if a.prime() != p {
        return Err(HilbertError::PrimeMismatch { expected: p, found: a.prime() });
    }
    if b.is_zero() {
        return Err(HilbertError::ZeroArgument);
    }
    let alpha = match a.valuation() {
        Valuation::Finite(v) => v,
        Valuation::Infinite => return Err(HilbertError::ZeroArgument),
    };
    let (beta, w) = unit_parts(&square_class_integer(b), p);
    let b_odd = beta.rem_euclid(2) == 1;
    let needed = if p == 2 {
        if b_odd {
            3
        } else if eps(w) == 1 {
            2
        } else {
            0
        }
    } else if b_odd {
        1
    } else {
        0
    };
    if a.precision() < needed {
        return Err(PadicError::PrecisionExhausted { needed, available: a.precision() }.into());
    }
    let u = if p == 2 {
        // Keep only the digits that are known; the formula then only reads
        // bits that the precision check above guarantees.
        match a.precision() {
            0 | 1 => 1,
            2 => a.unit() % 4,
            _ => a.unit() % 8,
        }
    } else {
        a.unit() % p
    };
    Ok(symbol_from_parts(p, alpha, u, beta, w))
}

/// Primes at which `(a, b)` can be nontrivial: those dividing `2ab`.
pub fn bad_primes(a: &BigRational, b: &BigRational) -> Vec<u64> {
    let mut set = BTreeSet::new();
    set.insert(2u64);
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        let mag = n.abs();
        let small = mag.to_u64().expect("desk-scale arguments fit in u64");
        for (p, _) in arith::factor_u64(small) {
            set.insert(p);
        }
    }
    set.into_iter().collect()
}

/// Sum of `(a, b)_v` over the real place and every prime dividing `2ab`.
pub fn product_formula_check(a: &BigRational, b: &BigRational) -> Result<bool, HilbertError> {
    let mut total = hilbert_symbol(a, b, Place::Real)?;
    for p in bad_primes(a, b) {
        total = total + hilbert_symbol(a, b, Place::Prime(p))?;
    }
    Ok(total.is_zero())
}

/// Convenience wrapper over integers.
pub fn product_formula_check_int(a: i64, b: i64) -> Result<bool, HilbertError> {
    product_formula_check(&BigRational::from_integer(a.into()), &BigRational::from_integer(b.into()))
}

/// Parse a rational written as `n` or `n/d`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}
