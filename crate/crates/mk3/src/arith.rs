//! Elementary number theory on machine integers and big integers.
//!
//! Everything here is exact. Modular routines take moduli below `2^63` so
//! that products fit in `u128`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Failures of the factorization helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// The input has more decimal digits than the configured trial-division bound.
    #[error("factorization too large: {digits} digits exceeds the bound of {bound}")]
    FactorizationTooLarge { digits: usize, bound: usize },
    /// Factorization of zero was requested.
    #[error("cannot factor zero")]
    Zero,
}

/// Default digit bound for trial-division factorization.
pub const DEFAULT_FACTOR_DIGITS: usize = 16;

/// `a * b mod m` without overflow for `m < 2^64`.
#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m`.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut b = base % m;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce_i128(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Reduce a big integer into `[0, m)`.
pub fn reduce_big(a: &BigInt, m: u64) -> u64 {
    a.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(reduce_i128(e.x, m))
}

/// Deterministic Miller-Rabin for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Prime factorization of a nonzero `u64` by trial division.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n <= 1 {
        return out;
    }
    let mut push = |p: u64, n: &mut u64| {
        let mut e = 0;
        while *n % p == 0 {
            *n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut p = 5u64;
    while p.saturating_mul(p) <= n {
        push(p, &mut n);
        push(p + 2, &mut n);
        p += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime factorization of `|n|` for a big integer, refusing inputs longer
/// than `max_digits` decimal digits.
pub fn factor_big(n: &BigInt, max_digits: usize) -> Result<Vec<(BigUint, u32)>, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Zero);
    }
    let m = n.magnitude().clone();
    let digits = m.to_string().len();
    if digits > max_digits {
        return Err(ArithError::FactorizationTooLarge { digits, bound: max_digits });
    }
    if let Some(small) = m.to_u64() {
        return Ok(factor_u64(small).into_iter().map(|(p, e)| (BigUint::from(p), e)).collect());
    }
    let mut rest = m;
    let mut out = Vec::new();
    let mut p = BigUint::from(2u32);
    while &p * &p <= rest {
        let mut e = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1u32;
    }
    if rest > BigUint::one() {
        out.push((rest, 1));
    }
    Ok(out)
}

/// Distinct prime divisors of a nonzero `i64`.
pub fn prime_divisors(n: i64) -> Vec<u64> {
    factor_u64(n.unsigned_abs()).into_iter().map(|(p, _)| p).collect()
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i128, n: u64) -> i8 {
    assert!(n % 2 == 1, "jacobi symbol needs an odd modulus");
    let mut a = reduce_i128(a, n);
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Legendre symbol of a big integer modulo an odd prime.
pub fn legendre_big(a: &BigInt, p: u64) -> i8 {
    jacobi(reduce_big(a, p) as i128, p)
}

/// `p`-adic valuation of a nonzero big integer together with the cofactor.
pub fn split_valuation(n: &BigInt, p: u64) -> (u32, BigInt) {
    assert!(!n.is_zero(), "valuation of zero");
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut rest = n.clone();
    loop {
        let (q, r) = rest.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        rest = q;
        v += 1;
    }
    (v, rest)
}

/// Valuation of a `u64` residue that is known nonzero.
pub fn val_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Squarefree part of a nonzero integer, sign retained.
pub fn squarefree_part(n: &BigInt, max_digits: usize) -> Result<BigInt, ArithError> {
    let mut out = BigInt::one();
    for (p, e) in factor_big(n, max_digits)? {
        if e % 2 == 1 {
            out *= BigInt::from(p);
        }
    }
    if n.sign() == Sign::Minus {
        out = -out;
    }
    Ok(out)
}

/// Exact square root of a nonnegative big integer, if it is a perfect square.
pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Exact square root of a nonnegative `i128`, if it is a perfect square.
pub fn exact_sqrt_i128(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let r = n.sqrt();
    if r * r == n {
        Some(r)
    } else {
        None
    }
}

/// Whether `a` is a square modulo `p^m` for an odd prime `p` and a unit `a`.
pub fn is_unit_square_odd(a: u64, p: u64) -> bool {
    jacobi(a as i128, p) == 1
}

/// Chinese remainder for coprime moduli, returning the residue modulo the product.
pub fn crt(residues: &[(i64, i64)]) -> Option<(i64, i64)> {
    let mut acc = (0i128, 1i128);
    for &(r, m) in residues {
        let (r, m) = (r as i128, m as i128);
        let e = acc.1.extended_gcd(&m);
        if e.gcd != 1 {
            return None;
        }
        let diff = (r - acc.0).rem_euclid(m);
        let t = (diff * e.x).rem_euclid(m);
        let modulus = acc.1 * m;
        acc = ((acc.0 + acc.1 * t).rem_euclid(modulus), modulus);
    }
    Some((acc.0 as i64, acc.1 as i64))
}
