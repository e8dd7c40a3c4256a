use std::time::Instant;

use mk3::frobenius::*;
use mk3::lattice::build_lattice;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn table() -> CountTable {
    count_table(3, 5, 3, DEFAULT_FIELD_CEILING).unwrap()
}

#[test]
fn counts_over_extensions_of_f5() {
    let t0 = Instant::now();
    assert_eq!(table().counts, vec![(1, 42), (2, 1032), (3, 16122)]);
    assert!(t0.elapsed().as_secs() < 30);
}

#[test]
fn counts_do_not_depend_on_the_representative() {
    for k in [-2, 8, 13, -392047] {
        assert_eq!(count_points(k, 5, 1).unwrap(), 42);
    }
}

#[test]
fn traces() {
    assert_eq!(quotient_traces(&table()), vec![r(-4, 5), r(-44, 25), r(-4, 125)]);
    let zero = CountTable { p: 5, counts: vec![(1, 0), (2, 0)] };
    assert_eq!(quotient_traces(&zero), vec![r(-5, 1) - r(1, 5) - r(4, 1), r(-25, 1) - r(1, 25) - r(18, 1)]);
}

#[test]
fn characteristic_polynomial() {
    let cp = newton_charpoly(&quotient_traces(&table())).unwrap();
    assert_eq!(cp.quotient, RatPoly::new(vec![r(1, 1), r(4, 5), r(6, 5), r(4, 5), r(1, 1)]));
    assert!(cp.quotient.is_palindromic());
    assert_eq!(count_unity_eigenvalues(&cp.quotient), 0);
    assert_eq!(count_unity_eigenvalues(&cp.full()), 18);
    assert_eq!(cp.full().degree(), 22);
    assert!(lefschetz_check(&table(), &cp).iter().all(|&b| b));
}

#[test]
fn picard_number_is_pinned() {
    // 18 independent classes from the lattice, at most 18 from Frobenius
    let l = build_lattice().unwrap();
    let lower = l.gram.rank();
    let cp = newton_charpoly(&quotient_traces(&table())).unwrap();
    let upper = count_unity_eigenvalues(&cp.full());
    assert_eq!((lower, upper), (18, 18));
}

#[test]
fn newton_edge_cases() {
    // four eigenvalues equal to 1
    let cp = newton_charpoly(&[r(4, 1), r(4, 1)]).unwrap();
    assert_eq!(cp.quotient, RatPoly::from_ints(&[1, -4, 6, -4, 1]));
    assert_eq!(count_unity_eigenvalues(&cp.quotient), 4);
    assert_eq!(newton_charpoly(&[r(0, 1), r(0, 1)]), Err(FrobeniusError::SignUndetermined));
    assert!(matches!(newton_charpoly(&[r(1, 1)]), Err(FrobeniusError::TooFewTraces(1))));
    assert!(matches!(newton_charpoly(&[r(-4, 5), r(-44, 25), r(1, 1)]), Err(FrobeniusError::InconsistentTrace { n: 3, .. })));
}

#[test]
fn scaled_quotient_has_no_unity_roots() {
    let five_f = RatPoly::from_ints(&[5, 4, 6, 4, 5]);
    assert_eq!(count_unity_eigenvalues(&five_f), 0);
    let mixed = RatPoly::from_ints(&[1, 0, 1]).mul(&RatPoly::from_ints(&[1, 1, 1])).mul(&five_f);
    assert_eq!(count_unity_eigenvalues(&mixed), 4);
}

#[test]
fn guards() {
    assert!(matches!(count_points_ordered(3, 5, 4, DEFAULT_FIELD_CEILING, [0, 1, 2]), Err(FrobeniusError::FieldTooLarge { size: 625, .. })));
    assert_eq!(count_points(1, 2, 1), Err(FrobeniusError::BadPrime(2)));
    assert_eq!(count_points(1, 9, 1), Err(FrobeniusError::BadPrime(9)));
}

#[test]
fn singular_reductions_are_detected() {
    // k = 0 mod p leaves the node at the origin
    for p in [3, 5, 7] {
        assert!(matches!(count_points(0, p, 1), Err(FrobeniusError::Singular(_))), "p = {p}");
    }
}

#[test]
fn subfield_points_inject() {
    let t = table();
    assert!(t.counts[1].1 >= t.counts[0].1 && t.counts[2].1 >= t.counts[0].1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn counts_are_symmetric(perm in Just([0usize, 1, 2]).prop_shuffle(), p in prop::sample::select(vec![5u64, 7, 11, 13]), k in 1i64..13) {
        let base = count_points_ordered(k, p, 1, DEFAULT_FIELD_CEILING, [0, 1, 2]);
        let permuted = count_points_ordered(k, p, 1, DEFAULT_FIELD_CEILING, [perm[0], perm[1], perm[2]]);
        prop_assert_eq!(base.is_ok(), permuted.is_ok());
        if let (Ok(a), Ok(b)) = (base, permuted) {
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn newton_round_trip(a in -20i64..20, b in -20i64..20, d in 1i64..10) {
        let traces = vec![r(a, d), r(b, d * d)];
        if let Ok(cp) = newton_charpoly(&traces) {
            let ps = cp.quotient_power_sums(3);
            prop_assert_eq!(&ps[..2], &traces[..]);
            let mut three = traces.clone();
            three.push(ps[2].clone());
            prop_assert_eq!(newton_charpoly(&three).unwrap(), cp);
        }
    }
}
