//! Sparse multivariate integer polynomials in the variables `x, y, z, k`.
//!
//! The family polynomials are linear in `k`, so reducing modulo a family
//! equation amounts to substituting for `k`; [`Poly::divide_by_linear`]
//! performs that division exactly and returns the quotient as a certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::arith;
use crate::padic::TripleEvaluator;

/// Number of variables.
pub const NVARS: usize = 4;
/// Variable names in index order.
pub const VAR_NAMES: [&str; NVARS] = ["x", "y", "z", "k"];

/// Exponent vector.
pub type Monomial = [u16; NVARS];

/// A polynomial with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant<T: Into<BigInt>>(c: T) -> Self {
        let mut p = Poly::zero();
        p.add_term([0; NVARS], c.into());
        p
    }

    /// The variable with index `i` (0 = x, 1 = y, 2 = z, 3 = k).
    pub fn var(i: usize) -> Self {
        let mut m = [0; NVARS];
        m[i] = 1;
        let mut p = Poly::zero();
        p.add_term(m, BigInt::one());
        p
    }

    pub fn x() -> Self {
        Poly::var(0)
    }
    pub fn y() -> Self {
        Poly::var(1)
    }
    pub fn z() -> Self {
        Poly::var(2)
    }
    pub fn k() -> Self {
        Poly::var(3)
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Integer power.
    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Multiply every coefficient by `c`.
    pub fn scale<T: Into<BigInt>>(&self, c: T) -> Poly {
        let c = c.into();
        let mut out = Poly::zero();
        for (m, v) in &self.terms {
            out.add_term(*m, v * &c);
        }
        out
    }

    /// Degree in variable `i`.
    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|m| m[i]).max().unwrap_or(0)
    }

    /// Formal partial derivative in variable `i`.
    pub fn derivative(&self, i: usize) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m[i] > 0 {
                let mut n = *m;
                n[i] -= 1;
                out.add_term(n, c * BigInt::from(m[i]));
            }
        }
        out
    }

    /// Substitute the polynomial `q` for variable `i`.
    pub fn substitute(&self, i: usize, q: &Poly) -> Poly {
        let deg = self.degree_in(i) as usize;
        let mut powers = vec![Poly::constant(1)];
        for d in 1..=deg {
            let next = &powers[d - 1] * q;
            powers.push(next);
        }
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut rest = *m;
            let e = rest[i] as usize;
            rest[i] = 0;
            let mut mono = Poly::zero();
            mono.add_term(rest, c.clone());
            out = &out + &(&mono * &powers[e]);
        }
        out
    }

    /// Substitute an integer value for `k`.
    pub fn specialize_k<T: Into<BigInt>>(&self, k: T) -> Poly {
        self.substitute(3, &Poly::constant(k))
    }

    /// Coefficients as a polynomial in variable `i`: entry `d` is the
    /// coefficient of `var_i^d`.
    pub fn coefficients_in(&self, i: usize) -> Vec<Poly> {
        let deg = self.degree_in(i) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (m, c) in &self.terms {
            let mut rest = *m;
            let e = rest[i] as usize;
            rest[i] = 0;
            out[e].add_term(rest, c.clone());
        }
        out
    }

    /// Divide by the monic linear polynomial `var_i - q`, where `q` does not
    /// involve `var_i`. Returns `(quotient, remainder)` with
    /// `self = (var_i - q) * quotient + remainder` and the remainder free of `var_i`.
    pub fn divide_by_linear(&self, i: usize, q: &Poly) -> (Poly, Poly) {
        assert_eq!(q.degree_in(i), 0, "divisor must be linear in the chosen variable");
        let c = self.coefficients_in(i);
        let n = c.len() - 1;
        if n == 0 {
            return (Poly::zero(), self.clone());
        }
        // Synthetic division: b_{n-1} = c_n, b_{j-1} = c_j + q b_j.
        let mut b = vec![Poly::zero(); n];
        b[n - 1] = c[n].clone();
        for j in (1..n).rev() {
            b[j - 1] = &c[j] + &(q * &b[j]);
        }
        let remainder = &c[0] + &(q * &b[0]);
        let mut quotient = Poly::zero();
        for (d, coeff) in b.into_iter().enumerate() {
            quotient = &quotient + &(&coeff * &Poly::var(i).pow(d as u32));
        }
        (quotient, remainder)
    }

    /// Exact evaluation at integer values of all four variables.
    pub fn eval_int(&self, vals: &[BigInt; NVARS]) -> BigInt {
        let mut total = BigInt::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..NVARS {
                if m[i] > 0 {
                    t *= vals[i].pow(m[i] as u32);
                }
            }
            total += t;
        }
        total
    }

    /// Exact evaluation at rational values.
    pub fn eval_rat(&self, vals: &[BigRational; NVARS]) -> BigRational {
        let mut total = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = BigRational::from_integer(c.clone());
            for i in 0..NVARS {
                if m[i] > 0 {
                    t *= num_traits::pow(vals[i].clone(), m[i] as usize);
                }
            }
            total += t;
        }
        total
    }

    /// Evaluate at integer `x, y, z` with `k` already specialized away.
    pub fn eval_xyz(&self, pt: &[BigInt; 3]) -> BigInt {
        debug_assert_eq!(self.degree_in(3), 0);
        self.eval_int(&[pt[0].clone(), pt[1].clone(), pt[2].clone(), BigInt::zero()])
    }

    /// Greatest common divisor of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide every coefficient by `d`, which must divide them all exactly.
    pub fn div_exact(&self, d: &BigInt) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            assert!(r.is_zero(), "inexact coefficient division");
            out.add_term(*m, q);
        }
        out
    }

    /// Whether the polynomial involves only `k` (or is constant).
    pub fn is_k_only(&self) -> bool {
        self.terms.keys().all(|m| m[0] == 0 && m[1] == 0 && m[2] == 0)
    }

    /// Replace `x, y, z` by `x / p^a, y / p^b, z / p^c` and clear the
    /// denominator by multiplying with `p^shift`, where `shift` is the
    /// smallest exponent making all coefficients integral. Returns the
    /// scaled polynomial and `shift`.
    pub fn scale_valuations(&self, p: u64, shifts: [u32; 3]) -> (Poly, u32) {
        let neg = |m: &Monomial| -> u32 { m[0] as u32 * shifts[0] + m[1] as u32 * shifts[1] + m[2] as u32 * shifts[2] };
        let shift = self.terms.keys().map(neg).max().unwrap_or(0);
        let pb = BigInt::from(p);
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c * pb.pow(shift - neg(m)));
        }
        (out, shift)
    }

    /// Rename `x, y, z`: variable `i` of the result is variable `perm[i]` of `self`.
    pub fn permute_xyz(&self, perm: [usize; 3]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut n = *m;
            for i in 0..3 {
                n[i] = m[perm[i]];
            }
            out.add_term(n, c.clone());
        }
        out
    }

    /// Whether every exponent of `x, y, z` is even.
    pub fn is_even(&self) -> bool {
        self.terms.keys().all(|m| m[..3].iter().all(|e| e % 2 == 0))
    }

    /// Compile for fast evaluation modulo `m` with `k` already substituted.
    pub fn compile_mod(&self, m: u64) -> ModPoly {
        ModPoly::new(self, m)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Print in descending total degree, then reverse lexicographic order.
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da: u16 = a.0.iter().sum();
            let db: u16 = b.0.iter().sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (n, (m, c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if n == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let is_const = m.iter().all(|&e| e == 0);
            let mut parts = Vec::new();
            if is_const || !mag.is_one() {
                parts.push(mag.to_string());
            }
            for i in 0..NVARS {
                match m[i] {
                    0 => {}
                    1 => parts.push(VAR_NAMES[i].to_string()),
                    e => parts.push(format!("{}^{}", VAR_NAMES[i], e)),
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let mut m = [0; NVARS];
                for i in 0..NVARS {
                    m[i] = ma[i] + mb[i];
                }
                out.add_term(m, ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

/// A polynomial in `x, y, z` with coefficients reduced modulo a fixed modulus.
#[derive(Debug, Clone)]
pub struct ModPoly {
    modulus: u64,
    max_deg: usize,
    terms: Vec<([u16; 3], u64)>,
}

impl ModPoly {
    /// Compile `p` (which must not involve `k`) for evaluation modulo `m`.
    pub fn new(p: &Poly, m: u64) -> Self {
        assert_eq!(p.degree_in(3), 0, "specialize k before compiling");
        let mut terms = Vec::new();
        let mut max_deg = 0;
        for (mono, c) in p.terms() {
            let r = arith::reduce_big(c, m);
            if r != 0 {
                terms.push(([mono[0], mono[1], mono[2]], r));
                max_deg = max_deg.max(mono[0].max(mono[1]).max(mono[2]) as usize);
            }
        }
        ModPoly { modulus: m, max_deg, terms }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Value at a residue triple.
    pub fn eval(&self, pt: [u64; 3]) -> u64 {
        let m = self.modulus;
        let mut pw = [[0u64; 16]; 3];
        let deg = self.max_deg.min(15);
        for i in 0..3 {
            pw[i][0] = 1 % m;
            for d in 1..=deg {
                pw[i][d] = arith::mul_mod(pw[i][d - 1], pt[i] % m, m);
            }
        }
        let mut acc: u128 = 0;
        for (e, c) in &self.terms {
            let t = arith::mul_mod(arith::mul_mod(pw[0][e[0] as usize], pw[1][e[1] as usize], m), pw[2][e[2] as usize], m);
            acc += arith::mul_mod(t, *c, m) as u128;
        }
        (acc % m as u128) as u64
    }
}

/// A polynomial in `x, y, z` bundled with its gradient, evaluated exactly.
#[derive(Debug, Clone)]
pub struct PolyTriple {
    f: Poly,
    grad: [Poly; 3],
}

impl PolyTriple {
    /// Bundle a `k`-free polynomial with its gradient.
    pub fn new(f: Poly) -> Self {
        assert_eq!(f.degree_in(3), 0, "specialize k first");
        let grad = [f.derivative(0), f.derivative(1), f.derivative(2)];
        PolyTriple { f, grad }
    }

    pub fn poly(&self) -> &Poly {
        &self.f
    }

    pub fn gradient(&self) -> &[Poly; 3] {
        &self.grad
    }

    /// Compile value and gradient for evaluation modulo `m`.
    pub fn compile(&self, m: u64) -> CompiledTriple {
        CompiledTriple {
            f: self.f.compile_mod(m),
            grad: [self.grad[0].compile_mod(m), self.grad[1].compile_mod(m), self.grad[2].compile_mod(m)],
        }
    }
}

impl TripleEvaluator for PolyTriple {
    fn eval(&self, pt: &[BigInt; 3]) -> BigInt {
        self.f.eval_xyz(pt)
    }
    fn partial(&self, i: usize, pt: &[BigInt; 3]) -> BigInt {
        self.grad[i].eval_xyz(pt)
    }
}

/// Value and gradient compiled for one modulus.
#[derive(Debug, Clone)]
pub struct CompiledTriple {
    pub f: ModPoly,
    pub grad: [ModPoly; 3],
}

/// Convert a small big integer to `i64`, panicking on overflow.
pub fn to_i64(n: &BigInt) -> i64 {
    n.to_i64().expect("value fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let x = Poly::x();
        let y = Poly::y();
        let p = &(&x * &x) - &(&y.scale(4) * &x);
        assert_eq!(p.to_string(), "x^2 - 4*x*y");
        assert_eq!(p.derivative(0).to_string(), "2*x - 4*y");
        assert_eq!(Poly::constant(-3).to_string(), "-3");
    }

    #[test]
    fn division_by_linear_reconstructs() {
        let q = &(&Poly::x() * &Poly::x()) + &Poly::y();
        let p = &(&Poly::k().pow(3) * &Poly::z()) - &Poly::k().scale(5);
        let (quot, rem) = p.divide_by_linear(3, &q);
        let back = &(&(&Poly::k() - &q) * &quot) + &rem;
        assert_eq!(back, p);
        assert_eq!(rem.degree_in(3), 0);
        assert_eq!(rem, p.substitute(3, &q));
    }

    #[test]
    fn modular_evaluation_matches_exact() {
        let p = &(&Poly::x().pow(2) * &Poly::y().pow(2)).scale(-4) + &Poly::z().pow(2);
        let p = &p + &Poly::constant(17);
        let mp = p.compile_mod(1024);
        for pt in [[1u64, 1, 1], [3, 5, 7], [100, 200, 1000]] {
            let exact = p.eval_xyz(&[BigInt::from(pt[0]), BigInt::from(pt[1]), BigInt::from(pt[2])]);
            assert_eq!(mp.eval(pt), arith::reduce_big(&exact, 1024));
        }
    }

    #[test]
    fn valuation_scaling_clears_denominators() {
        let p = &(&Poly::x().pow(2) * &Poly::y().pow(2)) + &Poly::constant(1);
        let (s, shift) = p.scale_valuations(2, [1, 3, 0]);
        assert_eq!(shift, 8);
        assert_eq!(s.to_string(), "x^2*y^2 + 256");
    }
}
