use mk3::hilbert::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-100_000i64..-1, 1i64..100_000]
}

fn rational() -> impl Strategy<Value = BigRational> {
    (nonzero(), 1i64..5_000).prop_map(|(n, d)| q(n, d))
}

/// Places where `(a, b)` can be nontrivial.
fn places(a: &BigRational, b: &BigRational) -> Vec<Place> {
    let mut v = vec![Place::Real];
    v.extend(bad_primes(a, b).into_iter().map(Place::Prime));
    v
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

/// `(a, b)_p` for odd `p` and integers prime to `p` except for one factor `p`
/// in `b`, by Euler's criterion.
fn odd_symbol_oracle(a: i64, p: u64) -> HalfInvariant {
    let r = a.rem_euclid(p as i64) as u64;
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        HalfInvariant::ZERO
    } else {
        HalfInvariant::HALF
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_formula(a in rational(), b in rational()) {
        prop_assert!(product_formula_check(&a, &b).unwrap());
        let total: HalfInvariant = places(&a, &b).into_iter().map(|v| hilbert_symbol(&a, &b, v).unwrap()).sum();
        prop_assert_eq!(total, HalfInvariant::ZERO);
    }

    #[test]
    fn symmetry(a in rational(), b in rational()) {
        for v in places(&a, &b) {
            prop_assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), hilbert_symbol(&b, &a, v).unwrap());
        }
    }

    #[test]
    fn bimultiplicativity(a in rational(), a2 in rational(), b in rational()) {
        let prod = &a * &a2;
        let mut ps = places(&a, &b);
        ps.extend(places(&a2, &b));
        for v in ps {
            prop_assert_eq!(hilbert_symbol(&prod, &b, v).unwrap(), hilbert_symbol(&a, &b, v).unwrap() + hilbert_symbol(&a2, &b, v).unwrap());
        }
    }

    #[test]
    fn steinberg_relations(a in rational()) {
        let one = BigRational::from_integer(1.into());
        for v in places(&a, &(-&a)) {
            prop_assert_eq!(hilbert_symbol(&a, &(-&a), v).unwrap(), HalfInvariant::ZERO);
        }
        let b = &one - &a;
        if b != BigRational::from_integer(0.into()) {
            for v in places(&a, &b) {
                prop_assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), HalfInvariant::ZERO);
            }
        }
    }

    #[test]
    fn odd_primes_follow_euler_criterion(a in nonzero(), u in nonzero(), p in prop::sample::select(vec![3u64, 5, 7, 11, 13, 101, 997])) {
        prop_assume!(a % p as i64 != 0 && u % p as i64 != 0);
        let b = u * p as i64;
        prop_assert_eq!(hilbert_symbol_int(a, b, Place::Prime(p)).unwrap(), odd_symbol_oracle(a, p));
        prop_assert_eq!(hilbert_symbol_int(a, u, Place::Prime(p)).unwrap(), HalfInvariant::ZERO);
    }
}

#[test]
fn reference_symbols() {
    assert_eq!(hilbert_symbol_int(-1, -1, Place::Real).unwrap(), HalfInvariant::HALF);
    assert_eq!(hilbert_symbol_int(-1, -1, Place::Prime(2)).unwrap(), HalfInvariant::HALF);
    assert_eq!(hilbert_symbol_int(3, -1, Place::Prime(2)).unwrap(), HalfInvariant::HALF);
    assert_eq!(hilbert_symbol_int(2, 3, Place::Prime(3)).unwrap(), HalfInvariant::HALF);
    assert_eq!(hilbert_symbol_int(5, 7, Place::Prime(2)).unwrap(), HalfInvariant::ZERO);
}

#[test]
fn bad_places_are_rejected() {
    assert!("1".parse::<Place>().is_err());
    assert!("15".parse::<Place>().is_err());
    assert_eq!("inf".parse::<Place>().unwrap(), Place::Real);
}
