//! Point counts of the `F3` surface over small finite fields and the
//! Frobenius characteristic polynomial they determine.
//!
//! The projective model is the `(2,2,2)`-surface in `(P^1)^3`
//!
//! ```text
//! X S T + Y R T + Z R S + 4 (X Y T + Y Z R + Z X S) - 16 X Y Z - k R S T = 0
//! ```
//!
//! with `X = x^2, R = r^2` and so on. Frobenius acts on the 18 algebraic
//! classes with 11 eigenvalues `1` and 7 eigenvalues `-1` (twisted by `q`),
//! leaving a degree 4 factor determined by the counts.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Largest field size counted by default.
pub const DEFAULT_FIELD_CEILING: u64 = 125;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrobeniusError {
    #[error("field of size {size} exceeds the ceiling {ceiling}")]
    FieldTooLarge { size: u64, ceiling: u64 },
    #[error("{0} is not an odd prime")]
    BadPrime(u64),
    #[error("reduction is singular at {0}")]
    Singular(String),
    #[error("need traces for n = 1, 2; got {0}")]
    TooFewTraces(usize),
    #[error("middle coefficient vanishes, so the sign of the functional equation is undetermined")]
    SignUndetermined,
    #[error("trace for n = {n} is {given}, but the polynomial predicts {predicted}")]
    InconsistentTrace { n: usize, given: BigRational, predicted: BigRational },
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// The field with `p^n` elements. Elements are indices `0..q`, read as
/// base-`p` digit vectors of polynomials modulo an irreducible `m(X)`.
pub struct FiniteField {
    p: u64,
    n: u32,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
}

impl FiniteField {
    pub fn new(p: u64, n: u32) -> Self {
        assert!(is_prime(p) && n >= 1);
        let q = p.pow(n) as usize;
        assert!(q <= u16::MAX as usize);
        let modulus = irreducible(p, n);
        let digits = |mut v: usize| -> Vec<u64> {
            (0..n)
                .map(|_| {
                    let d = (v as u64) % p;
                    v /= p as usize;
                    d
                })
                .collect()
        };
        let index = |d: &[u64]| d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize);
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        for a in 0..q {
            let da = digits(a);
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = index(&s) as u16;
                let mut prod = vec![0u64; 2 * n as usize];
                for (i, x) in da.iter().enumerate() {
                    for (j, y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                // reduce by the monic modulus
                for deg in (n as usize..prod.len()).rev() {
                    let c = prod[deg];
                    if c != 0 {
                        for (i, m) in modulus.iter().enumerate().take(n as usize) {
                            let t = deg - n as usize + i;
                            prod[t] = (prod[t] + (p - c) * m) % p;
                        }
                        prod[deg] = 0;
                    }
                }
                mul[a * q + b] = index(&prod[..n as usize]) as u16;
            }
        }
        let neg = (0..q).map(|a| index(&digits(a).iter().map(|d| (p - d) % p).collect::<Vec<_>>()) as u16).collect();
        FiniteField { p, n, q, add, mul, neg }
    }

    pub fn size(&self) -> usize {
        self.q
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, v: i64) -> u16 {
        v.rem_euclid(self.p as i64) as u16
    }

    #[inline]
    pub fn add(&self, a: u16, b: u16) -> u16 {
        self.add[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        self.mul[a as usize * self.q + b as usize]
    }

    #[inline]
    pub fn sub(&self, a: u16, b: u16) -> u16 {
        self.add(a, self.neg[b as usize])
    }
}

/// Monic irreducible polynomial of degree `n` over `F_p`, coefficients low
/// to high with the leading 1 included. Found by trial division.
fn irreducible(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    let monic = |tail: u64, deg: usize| -> Vec<u64> {
        let mut v = Vec::with_capacity(deg + 1);
        let mut t = tail;
        for _ in 0..deg {
            v.push(t % p);
            t /= p;
        }
        v.push(1);
        v
    };
    let divides = |d: &[u64], f: &[u64]| -> bool {
        let mut r = f.to_vec();
        let dd = d.len() - 1;
        for deg in (dd..r.len()).rev() {
            let c = r[deg];
            if c != 0 {
                for (i, x) in d.iter().enumerate() {
                    let t = deg - dd + i;
                    r[t] = (r[t] + (p - c) * x) % p;
                }
            }
        }
        r.iter().all(|&c| c == 0)
    };
    for tail in 0..p.pow(n as u32) {
        let f = monic(tail, n);
        if n == 1 {
            return f;
        }
        let reducible = (1..=n / 2).any(|d| (0..p.pow(d as u32)).any(|t| divides(&monic(t, d), &f)));
        if !reducible {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Points of `P^1(F_q)` as `(x, r)`: the affine points `(a, 1)` then `(1, 0)`.
fn projective_line(ff: &FiniteField) -> Vec<(u16, u16)> {
    let mut v: Vec<(u16, u16)> = (0..ff.q as u16).map(|a| (a, 1)).collect();
    v.push((1, 0));
    v
}

/// Value and partial derivatives (up to the unit 2) of the form.
struct Evaluator<'a> {
    ff: &'a FiniteField,
    four: u16,
    sixteen: u16,
    k: u16,
}

impl Evaluator<'_> {
    fn value(&self, sq: [u16; 6]) -> u16 {
        let f = self.ff;
        let [x, y, z, r, s, t] = sq;
        let m3 = |a, b, c| f.mul(f.mul(a, b), c);
        let mut v = f.add(f.add(m3(x, s, t), m3(y, r, t)), m3(z, r, s));
        let mixed = f.add(f.add(m3(x, y, t), m3(y, z, r)), m3(z, x, s));
        v = f.add(v, f.mul(self.four, mixed));
        v = f.sub(v, f.mul(self.sixteen, m3(x, y, z)));
        f.sub(v, f.mul(self.k, m3(r, s, t)))
    }

    /// Whether every partial derivative vanishes; the partials are
    /// `2 x (..)` etc., so the unit 2 is dropped.
    fn gradient_vanishes(&self, pt: [u16; 6], sq: [u16; 6]) -> bool {
        let f = self.ff;
        let [x, y, z, r, s, t] = sq;
        let (c4, c16, k) = (self.four, self.sixteen, self.k);
        let px = f.sub(f.add(f.add(f.mul(s, t), f.mul(c4, f.mul(y, t))), f.mul(c4, f.mul(z, s))), f.mul(c16, f.mul(y, z)));
        let py = f.sub(f.add(f.add(f.mul(r, t), f.mul(c4, f.mul(x, t))), f.mul(c4, f.mul(z, r))), f.mul(c16, f.mul(x, z)));
        let pz = f.sub(f.add(f.add(f.mul(r, s), f.mul(c4, f.mul(y, r))), f.mul(c4, f.mul(x, s))), f.mul(c16, f.mul(x, y)));
        let pr = f.sub(f.add(f.add(f.mul(y, t), f.mul(z, s)), f.mul(c4, f.mul(y, z))), f.mul(k, f.mul(s, t)));
        let ps = f.sub(f.add(f.add(f.mul(x, t), f.mul(z, r)), f.mul(c4, f.mul(z, x))), f.mul(k, f.mul(r, t)));
        let pt_ = f.sub(f.add(f.add(f.mul(x, s), f.mul(y, r)), f.mul(c4, f.mul(x, y))), f.mul(k, f.mul(r, s)));
        [px, py, pz, pr, ps, pt_].iter().zip(pt).all(|(g, c)| f.mul(*g, c) == 0)
    }
}

/// Number of `F_{p^n}`-points of the reduction of the `F3` surface with
/// `k = kmod (mod p)`. The `order` permutes the three projections; the
/// count does not depend on it.
pub fn count_points_ordered(kmod: i64, p: u64, n: u32, ceiling: u64, order: [usize; 3]) -> Result<u64, FrobeniusError> {
    if p == 2 || !is_prime(p) {
        return Err(FrobeniusError::BadPrime(p));
    }
    let size = p.checked_pow(n).unwrap_or(u64::MAX);
    if size > ceiling {
        return Err(FrobeniusError::FieldTooLarge { size, ceiling });
    }
    let ff = FiniteField::new(p, n);
    let ev = Evaluator { ff: &ff, four: ff.from_int(4), sixteen: ff.from_int(16), k: ff.from_int(kmod) };
    let line = projective_line(&ff);
    let results: Vec<Result<u64, String>> = line
        .par_iter()
        .map(|&a| {
            let mut count = 0u64;
            for &b in &line {
                for &c in &line {
                    let chosen = [a, b, c];
                    let coords = [chosen[order[0]], chosen[order[1]], chosen[order[2]]];
                    let pt = [coords[0].0, coords[1].0, coords[2].0, coords[0].1, coords[1].1, coords[2].1];
                    let sq = pt.map(|v| ff.mul(v, v));
                    if ev.value(sq) != 0 {
                        continue;
                    }
                    if ev.gradient_vanishes(pt, sq) {
                        return Err(format!("([{}:{}], [{}:{}], [{}:{}]) over F_{}", pt[0], pt[3], pt[1], pt[4], pt[2], pt[5], size));
                    }
                    count += 1;
                }
            }
            Ok(count)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r.map_err(FrobeniusError::Singular)?;
    }
    Ok(total)
}

pub fn count_points(kmod: i64, p: u64, n: u32) -> Result<u64, FrobeniusError> {
    count_points_ordered(kmod, p, n, DEFAULT_FIELD_CEILING, [0, 1, 2])
}

/// Counts over `F_{p^n}` for `n = 1..`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountTable {
    pub p: u64,
    pub counts: Vec<(u32, u64)>,
}

pub fn count_table(kmod: i64, p: u64, max_n: u32, ceiling: u64) -> Result<CountTable, FrobeniusError> {
    let counts = (1..=max_n).map(|n| count_points_ordered(kmod, p, n, ceiling, [0, 1, 2]).map(|c| (n, c))).collect::<Result<_, _>>()?;
    Ok(CountTable { p, counts })
}

/// Trace of `F^n` on the eleven `+1` and seven `-1` algebraic classes.
pub fn algebraic_trace(n: u32) -> i64 {
    11 + if n % 2 == 0 { 7 } else { -7 }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn pow_rat(p: u64, n: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(p).pow(n))
}

/// Traces of `F^n` on the transcendental piece:
/// `count / q - q - 1 / q - t_n` with `q = p^n`.
pub fn quotient_traces(table: &CountTable) -> Vec<BigRational> {
    table
        .counts
        .iter()
        .map(|&(n, c)| {
            let q = pow_rat(table.p, n);
            BigRational::from_integer(BigInt::from(c)) / &q - &q - q.recip() - rat(algebraic_trace(n))
        })
        .collect()
}

/// Dense polynomial with rational coefficients, low degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly(Vec<BigRational>);

impl RatPoly {
    pub fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        RatPoly(c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        RatPoly::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, with the zero polynomial at degree 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly(vec![]);
        }
        let mut c = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }

    pub fn pow(&self, e: u32) -> RatPoly {
        (0..e).fold(RatPoly::from_ints(&[1]), |acc, _| acc.mul(self))
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.0.clone();
        let dd = d.degree();
        if r.len() <= dd {
            return (RatPoly(vec![]), self.clone());
        }
        let lead = d.0[dd].clone();
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for deg in (dd..r.len()).rev() {
            let c = &r[deg] / &lead;
            if c.is_zero() {
                continue;
            }
            for (i, x) in d.0.iter().enumerate() {
                r[deg - dd + i] -= &c * x;
            }
            q[deg - dd] = c;
        }
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn eval(&self, t: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * t + c)
    }

    /// `t^deg f(1/t) = f(t)`.
    pub fn is_palindromic(&self) -> bool {
        self.0.iter().eq(self.0.iter().rev())
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            let coeff = if a.is_one() && i > 0 {
                String::new()
            } else if a.is_integer() {
                a.to_string()
            } else {
                format!("({a})")
            };
            match i {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coeff}t")?,
                _ => write!(f, "{coeff}t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for RatPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.0.iter().map(|c| c.to_string()))
    }
}

/// The `m`-th cyclotomic polynomial.
pub fn cyclotomic(m: u64) -> RatPoly {
    let mut num = vec![rat(0); m as usize + 1];
    num[0] = rat(-1);
    num[m as usize] = rat(1);
    let mut f = RatPoly::new(num);
    for d in (1..m).filter(|d| m % d == 0) {
        f = f.div_rem(&cyclotomic(d)).0;
    }
    f
}

fn euler_phi(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

/// Number of roots (with multiplicity) of `f` that are roots of unity.
pub fn count_unity_eigenvalues(f: &RatPoly) -> usize {
    let deg = f.degree() as u64;
    let mut rest = f.clone();
    let mut total = 0;
    // phi(m) >= sqrt(m / 2)
    for m in 1..=(2 * deg * deg).max(2) {
        let phi = euler_phi(m);
        if phi > deg {
            continue;
        }
        let c = cyclotomic(m);
        loop {
            let (q, r) = rest.div_rem(&c);
            if !r.is_zero() || rest.degree() < c.degree() {
                break;
            }
            rest = q;
            total += phi as usize;
        }
    }
    total
}

/// The Frobenius characteristic polynomial: `(t-1)^11 (t+1)^7 f(t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharPoly {
    /// The degree 4 transcendental factor.
    pub quotient: RatPoly,
    pub ones: u32,
    pub minus_ones: u32,
}

impl CharPoly {
    pub fn full(&self) -> RatPoly {
        RatPoly::from_ints(&[-1, 1]).pow(self.ones).mul(&RatPoly::from_ints(&[1, 1]).pow(self.minus_ones)).mul(&self.quotient)
    }

    /// Power sums of the roots of the quotient piece, `n = 1..=count`.
    pub fn quotient_power_sums(&self, count: usize) -> Vec<BigRational> {
        power_sums(&self.quotient, count)
    }

    /// Trace of `F^n` on all of `H^2` (twisted).
    pub fn full_trace(&self, n: u32) -> BigRational {
        let ps = self.quotient_power_sums(n as usize);
        let alg = i64::from(self.ones) + if n % 2 == 0 { 1 } else { -1 } * i64::from(self.minus_ones);
        rat(alg) + &ps[n as usize - 1]
    }
}

/// Power sums of the roots of a monic polynomial via Newton's identities.
fn power_sums(f: &RatPoly, count: usize) -> Vec<BigRational> {
    let d = f.degree();
    // e_i with f = t^d - e1 t^(d-1) + e2 t^(d-2) - ...
    let e: Vec<BigRational> = (0..=d).map(|i| if i % 2 == 0 { f.0[d - i].clone() } else { -f.0[d - i].clone() }).collect();
    let mut p: Vec<BigRational> = Vec::with_capacity(count);
    for k in 1..=count {
        let mut s = BigRational::zero();
        for i in 1..k.min(d + 1) {
            let term = &e[i] * &p[k - i - 1];
            if i % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        if k <= d {
            let term = rat(k as i64) * &e[k];
            if k % 2 == 1 {
                s += term;
            } else {
                s -= term;
            }
        }
        p.push(s);
    }
    p
}

/// Recover the degree 4 factor from the traces of `F` and `F^2`, using the
/// functional equation `t^4 f(1/t) = f(t)`. A third trace, if given, is
/// checked against the result.
pub fn newton_charpoly(traces: &[BigRational]) -> Result<CharPoly, FrobeniusError> {
    if traces.len() < 2 {
        return Err(FrobeniusError::TooFewTraces(traces.len()));
    }
    let e1 = traces[0].clone();
    let e2 = (&e1 * &traces[0] - &traces[1]) / rat(2);
    // with sign -1 the middle coefficient is forced to vanish
    if e2.is_zero() {
        return Err(FrobeniusError::SignUndetermined);
    }
    let (e3, e4) = (e1.clone(), rat(1));
    let quotient = RatPoly::new(vec![e4, -e3, e2, -e1, rat(1)]);
    let cp = CharPoly { quotient, ones: 11, minus_ones: 7 };
    let predicted = cp.quotient_power_sums(traces.len());
    for (i, (g, p)) in traces.iter().zip(&predicted).enumerate().skip(2) {
        if g != p {
            return Err(FrobeniusError::InconsistentTrace { n: i + 1, given: g.clone(), predicted: p.clone() });
        }
    }
    Ok(cp)
}

/// `count = 1 + q^2 + q * Tr(F^n | H^2)` for each counted `n`.
pub fn lefschetz_check(table: &CountTable, cp: &CharPoly) -> Vec<bool> {
    table
        .counts
        .iter()
        .map(|&(n, c)| {
            let q = pow_rat(table.p, n);
            BigRational::from_integer(BigInt::from(c)) == rat(1) + &q * &q + &q * cp.full_trace(n)
        })
        .collect()
}

/// Counts, traces and the resulting bound on the geometric Picard number.
#[derive(Debug, Clone, Serialize)]
pub struct FrobeniusReport {
    pub p: u64,
    pub kmod: i64,
    pub counts: CountTable,
    #[serde(serialize_with = "serialize_rationals")]
    pub traces: Vec<BigRational>,
    pub f: String,
    pub charpoly: CharPoly,
    pub palindromic: bool,
    pub unity_roots_of_f: usize,
    /// Roots of unity among the eigenvalues; bounds the Picard number.
    pub unity_roots: usize,
    pub lefschetz: Vec<bool>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|c| c.to_string()))
}

pub fn frobenius_report(p: u64, kmod: i64, max_n: u32, ceiling: u64) -> Result<FrobeniusReport, FrobeniusError> {
    let counts = count_table(kmod, p, max_n, ceiling)?;
    let traces = quotient_traces(&counts);
    let charpoly = newton_charpoly(&traces)?;
    Ok(FrobeniusReport {
        p,
        kmod: kmod.rem_euclid(p as i64),
        f: charpoly.quotient.to_string(),
        palindromic: charpoly.quotient.is_palindromic(),
        unity_roots_of_f: count_unity_eigenvalues(&charpoly.quotient),
        unity_roots: count_unity_eigenvalues(&charpoly.full()),
        lefschetz: lefschetz_check(&counts, &charpoly),
        traces,
        counts,
        charpoly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn field_axioms_small() {
        for (p, n) in [(3, 2), (5, 2), (2, 3)] {
            let f = FiniteField::new(p, n);
            let q = f.size() as u16;
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.sub(a, a), 0);
                if a != 0 {
                    assert!((1..q).any(|b| f.mul(a, b) == 1), "{a} has no inverse in F_{}", q);
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                }
            }
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic(1), RatPoly::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic(4), RatPoly::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), RatPoly::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic(12).degree(), 4);
    }

    #[test]
    fn power_sums_of_known_roots() {
        // roots 1, 2, 3
        let f = RatPoly::from_ints(&[-6, 11, -6, 1]);
        assert_eq!(power_sums(&f, 4), vec![r(6, 1), r(14, 1), r(36, 1), r(98, 1)]);
    }

    #[test]
    fn display() {
        let f = RatPoly::new(vec![r(1, 1), r(4, 5), r(6, 5), r(4, 5), r(1, 1)]);
        assert_eq!(f.to_string(), "t^4 + (4/5)t^3 + (6/5)t^2 + (4/5)t + 1");
    }
}
