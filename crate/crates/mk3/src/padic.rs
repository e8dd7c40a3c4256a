//! Finite-precision p-adic numbers, square classes and multivariate Hensel lifting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use std::fmt;
use thiserror::Error;

use crate::arith::{self, split_valuation};

/// Largest `p^precision` we keep in machine words.
const MAX_MODULUS: u128 = 1 << 62;

/// Errors raised by p-adic arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    /// The operation is undefined for the exact zero.
    #[error("zero input")]
    Zero,
    /// The supplied unit residue is divisible by the prime.
    #[error("unit residue {unit} is divisible by {prime}")]
    NotUnit { unit: u64, prime: u64 },
    /// Not enough digits to decide the requested quantity.
    #[error("precision exhausted: need at least {needed} significant digits, have {available}")]
    PrecisionExhausted { needed: u32, available: u32 },
    /// `prime^precision` does not fit the machine representation.
    #[error("precision {precision} too large for prime {prime}")]
    PrecisionTooLarge { prime: u64, precision: u32 },
    /// Two values over different primes were combined.
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u64, u64),
}

/// Errors raised by Hensel lifting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HenselError {
    /// The residue point does not satisfy `F = 0` modulo `p^m`.
    #[error("point is not a zero of the polynomial modulo {prime}^{exponent}")]
    NotAZero { prime: u64, exponent: u32 },
    /// Every partial derivative vanishes modulo `p^m`.
    #[error("singular point: all partial derivatives vanish modulo {prime}^{exponent}")]
    Singular { prime: u64, exponent: u32 },
    /// The Newton condition `m > 2e` fails.
    #[error("not certified liftable: exponent {exponent} is not greater than twice the derivative valuation {e}")]
    NotCertified { exponent: u32, e: u32 },
}

/// A p-adic valuation, with a distinguished value for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// `v_p` of a big integer.
pub fn valuation_int(n: &BigInt, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    Valuation::Finite(split_valuation(n, p).0 as i64)
}

/// `v_p` of a rational number.
pub fn valuation(n: &BigRational, p: u64) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinite;
    }
    let a = split_valuation(n.numer(), p).0 as i64;
    let b = split_valuation(n.denom(), p).0 as i64;
    Valuation::Finite(a - b)
}

/// Square class of a nonzero p-adic number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SquareClass {
    Square,
    Nonsquare,
    Undetermined,
}

/// `p^e` as a `u64`, or an error if it does not fit.
pub fn prime_power(p: u64, e: u32) -> Result<u64, PadicError> {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc *= p as u128;
        if acc > MAX_MODULUS {
            return Err(PadicError::PrecisionTooLarge { prime: p, precision: e });
        }
    }
    Ok(acc as u64)
}

/// A p-adic number `p^valuation * unit`, with `unit` known modulo `p^precision`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PadicApprox {
    prime: u64,
    valuation: i64,
    unit: u64,
    precision: u32,
    zero: bool,
}

impl PadicApprox {
    /// Build from a valuation and a unit residue, reducing the unit.
    pub fn new(prime: u64, valuation: i64, unit: u64, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::PrecisionExhausted { needed: 1, available: 0 });
        }
        let modulus = prime_power(prime, precision)?;
        let unit = unit % modulus;
        if unit % prime == 0 {
            return Err(PadicError::NotUnit { unit, prime });
        }
        Ok(PadicApprox { prime, valuation, unit, precision, zero: false })
    }

    /// The exact zero.
    pub fn zero(prime: u64) -> Self {
        PadicApprox { prime, valuation: 0, unit: 0, precision: 0, zero: true }
    }

    /// Embed an exact rational, keeping `precision` digits of its unit part.
    pub fn from_rational(q: &BigRational, prime: u64, precision: u32) -> Result<Self, PadicError> {
        if q.is_zero() {
            return Ok(Self::zero(prime));
        }
        let (a, num) = split_valuation(q.numer(), prime);
        let (b, den) = split_valuation(q.denom(), prime);
        let modulus = prime_power(prime, precision)?;
        let n = arith::reduce_big(&num, modulus);
        let d = arith::reduce_big(&den, modulus);
        let dinv = arith::inv_mod(d, modulus).expect("denominator cofactor is a unit");
        Self::new(prime, a as i64 - b as i64, arith::mul_mod(n, dinv, modulus), precision)
    }

    /// Embed an exact integer.
    pub fn from_int(n: &BigInt, prime: u64, precision: u32) -> Result<Self, PadicError> {
        Self::from_rational(&BigRational::from_integer(n.clone()), prime, precision)
    }

    /// Interpret a residue known modulo `p^m`. Fails when the residue is zero,
    /// since then the value is not determined by the available digits.
    pub fn from_residue(r: u64, prime: u64, m: u32) -> Result<Self, PadicError> {
        let modulus = prime_power(prime, m)?;
        let r = r % modulus;
        if r == 0 {
            return Err(PadicError::PrecisionExhausted { needed: m + 1, available: m });
        }
        let v = arith::val_u64(r, prime);
        let unit = r / prime_power(prime, v)?;
        Self::new(prime, v as i64, unit, m - v)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }

    /// Valuation, infinite for zero.
    pub fn valuation(&self) -> Valuation {
        if self.zero {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.valuation)
        }
    }

    /// Unit residue modulo `p^precision`.
    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Multiply by `p^n`.
    pub fn shift(&self, n: i64) -> Self {
        let mut out = self.clone();
        if !out.zero {
            out.valuation += n;
        }
        out
    }

    /// Product, with precision the smaller of the two.
    pub fn mul(&self, other: &Self) -> Result<Self, PadicError> {
        if self.prime != other.prime {
            return Err(PadicError::PrimeMismatch(self.prime, other.prime));
        }
        if self.zero || other.zero {
            return Ok(Self::zero(self.prime));
        }
        let precision = self.precision.min(other.precision);
        let modulus = prime_power(self.prime, precision)?;
        let unit = arith::mul_mod(self.unit % modulus, other.unit % modulus, modulus);
        Self::new(self.prime, self.valuation + other.valuation, unit, precision)
    }

    /// Drop digits down to `precision`.
    pub fn truncate(&self, precision: u32) -> Result<Self, PadicError> {
        if self.zero || precision >= self.precision {
            return Ok(self.clone());
        }
        Self::new(self.prime, self.valuation, self.unit, precision)
    }

    /// Whether two approximations are compatible, comparing units at the
    /// common precision.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.prime != other.prime || self.zero != other.zero {
            return false;
        }
        if self.zero {
            return true;
        }
        if self.valuation != other.valuation {
            return false;
        }
        let precision = self.precision.min(other.precision);
        let modulus = prime_power(self.prime, precision).expect("precision already validated");
        self.unit % modulus == other.unit % modulus
    }
}

impl fmt::Display for PadicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.zero {
            return write!(f, "0 (in Q_{})", self.prime);
        }
        write!(
            f,
            "{}^{} * {} (mod {}^{})",
            self.prime, self.valuation, self.unit, self.prime, self.precision
        )
    }
}

/// Square class of a nonzero p-adic number.
pub fn square_class(a: &PadicApprox) -> Result<SquareClass, PadicError> {
    if a.zero {
        return Err(PadicError::Zero);
    }
    let odd_valuation = a.valuation.rem_euclid(2) == 1;
    if a.prime == 2 {
        if a.precision < 3 {
            return Ok(SquareClass::Undetermined);
        }
        if odd_valuation || a.unit % 8 != 1 {
            return Ok(SquareClass::Nonsquare);
        }
        return Ok(SquareClass::Square);
    }
    if a.precision < 1 {
        return Ok(SquareClass::Undetermined);
    }
    if odd_valuation || !arith::is_unit_square_odd(a.unit % a.prime, a.prime) {
        return Ok(SquareClass::Nonsquare);
    }
    Ok(SquareClass::Square)
}

/// A polynomial map `Z^3 -> Z` with integer coefficients, evaluated exactly.
pub trait TripleEvaluator {
    /// Value at an integer point.
    fn eval(&self, pt: &[BigInt; 3]) -> BigInt;
    /// Partial derivative in coordinate `i` at an integer point.
    fn partial(&self, i: usize, pt: &[BigInt; 3]) -> BigInt;
}

/// A residue point certified (or not) to lift to a p-adic zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct ResidueWitness {
    pub prime: u64,
    pub exponent: u32,
    pub point: [u64; 3],
    pub liftable: bool,
    pub lift_margin: i64,
}

impl ResidueWitness {
    /// Minimal partial-derivative valuation `e`, encoded back from the margin.
    pub fn derivative_valuation(&self) -> u32 {
        ((self.exponent as i64 - self.lift_margin) / 2) as u32
    }

    /// Number of reliable digits of the lifted root: the lift agrees with the
    /// residue point modulo `p^(m-e)`.
    pub fn reliable_digits(&self) -> u32 {
        self.exponent - self.derivative_valuation()
    }
}

fn point_big(pt: &[u64; 3]) -> [BigInt; 3] {
    [BigInt::from(pt[0]), BigInt::from(pt[1]), BigInt::from(pt[2])]
}

fn capped_valuation(n: &BigInt, p: u64, cap: u32) -> u32 {
    if n.is_zero() {
        return cap;
    }
    (split_valuation(n, p).0).min(cap)
}

/// Index and valuation of the partial derivative of least valuation, lowest
/// index on ties. Valuations are capped at `m`.
pub fn minimal_partial<F: TripleEvaluator + ?Sized>(f: &F, pt: &[BigInt; 3], p: u64, m: u32) -> (usize, u32) {
    let mut best = (0usize, u32::MAX);
    for i in 0..3 {
        let v = capped_valuation(&f.partial(i, pt), p, m);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Check `F(point) = 0 mod p^m` and compute the Newton margin.
pub fn certify<F: TripleEvaluator + ?Sized>(f: &F, p: u64, m: u32, point: [u64; 3]) -> Result<ResidueWitness, HenselError> {
    let pt = point_big(&point);
    let value = f.eval(&pt);
    let modulus = BigInt::from(p).pow(m);
    if !value.mod_floor(&modulus).is_zero() {
        return Err(HenselError::NotAZero { prime: p, exponent: m });
    }
    let (_, e) = minimal_partial(f, &pt, p, m);
    if e >= m {
        return Ok(ResidueWitness { prime: p, exponent: m, point, liftable: false, lift_margin: m as i64 - 2 * m as i64 });
    }
    let margin = m as i64 - 2 * e as i64;
    Ok(ResidueWitness { prime: p, exponent: m, point, liftable: margin >= 1, lift_margin: margin })
}

/// Lift a certified residue point to a zero modulo `p^n`.
///
/// Newton iteration runs along the coordinate of least derivative valuation;
/// the result is congruent to the witness modulo `p^(m-e)`.
pub fn hensel_lift<F: TripleEvaluator + ?Sized>(f: &F, w: &ResidueWitness, n: u32) -> Result<[BigInt; 3], HenselError> {
    let p = w.prime;
    let m = w.exponent;
    let mut pt = point_big(&w.point);
    let pm = BigInt::from(p).pow(m);
    if !f.eval(&pt).mod_floor(&pm).is_zero() {
        return Err(HenselError::NotAZero { prime: p, exponent: m });
    }
    let (i, e) = minimal_partial(f, &pt, p, m);
    if e >= m {
        return Err(HenselError::Singular { prime: p, exponent: m });
    }
    if m <= 2 * e {
        return Err(HenselError::NotCertified { exponent: m, e });
    }
    let target = BigInt::from(p).pow(n.max(m));
    let work = BigInt::from(p).pow(n.max(m) + e + 1);
    let pb = BigInt::from(p);
    loop {
        let value = f.eval(&pt);
        if value.mod_floor(&target).is_zero() {
            break;
        }
        let (vf, a) = split_valuation(&value, p);
        let deriv = f.partial(i, &pt);
        let (vd, u) = split_valuation(&deriv, p);
        debug_assert_eq!(vd, e, "derivative valuation is stable along the Newton path");
        let u_inv = u.mod_floor(&work).modinv(&work).expect("derivative cofactor is a unit");
        let step = (-(a * u_inv)).mod_floor(&work) * pb.pow(vf - e);
        pt[i] = (&pt[i] + step).mod_floor(&work);
    }
    let out_mod = BigInt::from(p).pow(n);
    Ok([pt[0].mod_floor(&out_mod), pt[1].mod_floor(&out_mod), pt[2].mod_floor(&out_mod)])
}

/// Residue of a big integer modulo `p^n` as a `u64`, for moduli that fit.
pub fn residue_u64(n: &BigInt, modulus: u64) -> u64 {
    n.mod_floor(&BigInt::from(modulus)).to_u64().expect("residue fits")
}

/// Whether a rational is a p-adic unit.
pub fn is_unit(q: &BigRational, p: u64) -> bool {
    valuation(q, p) == Valuation::Finite(0)
}

/// Sign of a rational as `-1`, `0` or `1`.
pub fn sign(q: &BigRational) -> i8 {
    if q.is_zero() {
        0
    } else if q.is_positive() {
        1
    } else {
        -1
    }
}
