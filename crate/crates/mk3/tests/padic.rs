use mk3::padic::*;
use mk3::scan::ResidueScanner;
use mk3::surfaces::{FamilyId, Surface};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-1_000_000i64..-1, 1i64..1_000_000]
}

fn small_prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97])
}

fn family() -> impl Strategy<Value = FamilyId> {
    prop::sample::select(vec![FamilyId::F1, FamilyId::F2, FamilyId::F3])
}

/// A certified level-`m` root of the surface, if the scan finds one.
fn certified_root(s: &Surface, p: u64, m: u32, pick: usize) -> Option<ResidueWitness> {
    let sc = ResidueScanner::new(&s.poly(), p, m, [false; 3]);
    let tree = sc.explore(m, 200_000, |w| Some(w.point));
    let all: Vec<ResidueWitness> = tree.found.into_values().collect();
    (!all.is_empty()).then(|| all[pick % all.len()].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn valuation_is_additive(a in nonzero(), b in nonzero(), c in 1i64..1000, d in 1i64..1000, p in small_prime()) {
        let x = q(a, c);
        let y = q(b, d);
        let sum = valuation(&x, p).finite().unwrap() + valuation(&y, p).finite().unwrap();
        prop_assert_eq!(valuation(&(&x * &y), p), Valuation::Finite(sum));
    }

    #[test]
    fn square_class_ignores_square_factors(u in nonzero(), a in nonzero(), p in small_prime()) {
        prop_assume!(u % p as i64 != 0);
        let prec = if p == 2 { 12 } else { 6 };
        let base = PadicApprox::from_int(&BigInt::from(u), p, prec).unwrap();
        let scaled = PadicApprox::from_int(&(BigInt::from(a) * BigInt::from(a) * BigInt::from(u)), p, prec).unwrap();
        prop_assert_eq!(square_class(&base).unwrap(), square_class(&scaled).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hensel_lifts_are_zeros(f in family(), k in -5000i64..5000, p in prop::sample::select(vec![2u64, 3, 5, 7]), pick in 0usize..1000, n in 4u32..30) {
        let s = Surface::new(f, k);
        let m = if p == 2 { 4 } else { 2 };
        let Some(w) = certified_root(&s, p, m, pick) else { return Ok(()) };
        prop_assume!(w.liftable);
        let ev = s.evaluator();
        let lift = hensel_lift(&ev, &w, n).unwrap();
        let modulus = BigInt::from(p).pow(n);
        prop_assert!(ev.eval(&lift).mod_floor(&modulus) == BigInt::from(0));
        // agreement with the residue to the reliable digits
        let r = BigInt::from(p).pow(w.reliable_digits());
        for i in 0..3 {
            prop_assert_eq!(lift[i].mod_floor(&r), BigInt::from(w.point[i]).mod_floor(&r));
        }
    }

    #[test]
    fn lifts_are_stable(f in family(), k in -5000i64..5000, p in prop::sample::select(vec![2u64, 3, 5]), pick in 0usize..1000, n in 4u32..15, extra in 1u32..10) {
        let s = Surface::new(f, k);
        let m = if p == 2 { 4 } else { 2 };
        let Some(w) = certified_root(&s, p, m, pick) else { return Ok(()) };
        prop_assume!(w.liftable);
        let ev = s.evaluator();
        let short = hensel_lift(&ev, &w, n).unwrap();
        let long = hensel_lift(&ev, &w, n + extra).unwrap();
        let e = w.derivative_valuation();
        let r = BigInt::from(p).pow(n - e);
        for i in 0..3 {
            prop_assert_eq!(short[i].mod_floor(&r), long[i].mod_floor(&r));
        }
    }
}

#[test]
fn uncertified_points_are_refused() {
    let s = Surface::new(FamilyId::F1, -17);
    let ev = s.evaluator();
    assert!(matches!(certify(&ev, 2, 3, [0, 0, 0]), Err(HenselError::NotAZero { .. })));
    let w = certify(&ev, 2, 3, [1, 1, 1]).unwrap();
    assert!(w.liftable);
    assert!(hensel_lift(&ev, &w, 40).is_ok());
}
