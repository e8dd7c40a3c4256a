use mk3::surfaces::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// All signed permutations; the equations only see squares.
fn orbit_set(p: [i64; 3]) -> Vec<[i64; 3]> {
    let mut v: Vec<[i64; 3]> = orbit_int(p).into_iter().flat_map(|q| [q, [-q[0], q[1], q[2]]]).collect();
    v.sort();
    v.dedup();
    v
}

#[test]
fn integral_searches() {
    let empty = integral_point_search(&Surface::new(FamilyId::F1, -17), 1000);
    assert!(empty.points.is_empty());
    let f2 = integral_point_search(&Surface::new(FamilyId::F2, 574), 1000);
    assert_eq!(f2.points, orbit_set([1, 1, 8]));
    let f3 = integral_point_search(&Surface::new(FamilyId::F3, -2911), 1000);
    assert_eq!(f3.points, orbit_set([1, 4, 4]));
    for r in [&f2, &f3] {
        assert_eq!(r.orbits.iter().map(|o| o.orbit_size).sum::<usize>(), r.points.len());
    }
}

#[test]
fn small_height_rational_points() {
    let s = Surface::new(FamilyId::F1, -17);
    let listed = [[(1, 2), (49, 24), (13, 5)], [(1, 3), (5, 2), (29, 8)], [(22, 25), (23, 16), (23, 12)], [(27, 29), (47, 34), (15, 8)], [(7, 32), (46, 15), (23, 4)]];
    for c in listed {
        assert!(s.evaluate(&AffinePoint::from_fracs(c)).is_zero(), "{c:?}");
    }
    let found = rational_point_search(&s, 50);
    assert!(contains_up_to_symmetry(&found, &AffinePoint::from_fracs(listed[0])));
    assert!(contains_up_to_symmetry(&found, &AffinePoint::from_fracs(listed[1])));
    for p in &found {
        assert!(s.evaluate(p).is_zero());
    }
    let fewer = rational_point_search(&s, 35);
    assert!(contains_up_to_symmetry(&fewer, &AffinePoint::from_fracs(listed[1])));
}

fn family() -> impl Strategy<Value = FamilyId> {
    prop::sample::select(vec![FamilyId::F1, FamilyId::F2, FamilyId::F3])
}

fn coord() -> impl Strategy<Value = BigRational> {
    (-50i64..50, 1i64..20).prop_map(|(n, d)| frac(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn equation_is_symmetric(f in family(), k in -1000i64..1000, x in coord(), y in coord(), z in coord()) {
        let s = Surface::new(f, k);
        let p = AffinePoint::new(x, y, z);
        let v = s.evaluate(&p);
        for g in symmetry_group() {
            prop_assert_eq!(s.evaluate(&p.apply(&g)), v.clone());
        }
    }

    #[test]
    fn gradient_is_the_derivative(f in family(), k in -1000i64..1000, x in coord(), y in coord(), z in coord()) {
        // F is a polynomial of degree <= 2 in each variable, so the central
        // difference with step h is exact up to the h^2 F''' term, which vanishes
        let s = Surface::new(f, k);
        let p = [x, y, z];
        let h = frac(1, 7);
        let g = s.gradient(&AffinePoint::from_coords(p.clone()));
        for i in 0..3 {
            let mut a = p.clone();
            let mut b = p.clone();
            a[i] += &h;
            b[i] -= &h;
            let diff = (s.evaluate(&AffinePoint::from_coords(a)) - s.evaluate(&AffinePoint::from_coords(b))) / (frac(2, 1) * &h);
            prop_assert_eq!(&diff, &g[i]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn search_results_lie_on_the_surface(f in family(), k in -3000i64..3000) {
        let s = Surface::new(f, k);
        let r = integral_point_search(&s, 60);
        for p in &r.points {
            prop_assert!(s.evaluate(&AffinePoint::from_ints(p[0], p[1], p[2])).is_zero());
        }
        for p in rational_point_search(&s, 6) {
            prop_assert!(s.evaluate(&p).is_zero());
        }
    }
}
