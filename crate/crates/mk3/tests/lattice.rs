use mk3::lattice::*;
use mk3::linalg::{AbelianGroup, IntMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn z2(n: usize) -> AbelianGroup {
    AbelianGroup { factors: vec![2; n], free_rank: 0 }
}

fn setup() -> (PicardLattice, GroupAction) {
    let l = build_lattice().unwrap();
    let a = GroupAction::on_picard(&l).unwrap();
    (l, a)
}

#[test]
fn gram_invariants() {
    let (l, _) = setup();
    assert_eq!(l.gram.det().unwrap(), BigInt::from(-48));
    let (pos, neg, zero) = l.gram.signature().unwrap();
    assert_eq!((pos, neg, zero), (1, 17, 0));
    assert!(l.gram.is_symmetric());
    assert!(l.expansions_consistent());
    assert!(l.expansion_rows_match());
}

#[test]
fn fibration_basis_spans_an_index_two_sublattice() {
    let (l, _) = setup();
    let (det, index) = fibration_basis_check(&l).unwrap();
    assert_eq!(det, BigInt::from(-192));
    assert_eq!(index, BigInt::from(2));
}

#[test]
fn quotient_by_fibers_is_free_of_rank_15() {
    let (l, _) = setup();
    assert_eq!(quotient_by_fibers(&l).unwrap(), QuotientDescription { rank: 15, torsion: vec![] });
    assert_eq!(quotient_by(&IntMatrix::zeros(18, 0)), QuotientDescription { rank: 18, torsion: vec![] });
    let twice = IntMatrix::identity(2).scale(&BigInt::from(2));
    assert_eq!(quotient_by(&twice), QuotientDescription { rank: 0, torsion: vec![2, 2] });
}

#[test]
fn action_is_an_isometric_representation() {
    let (l, a) = setup();
    assert!(a.is_isometry(&l.gram));
    assert!(a.presentation_holds());
    assert!(!a.sigma.pow(2).is_identity());
}

#[test]
fn first_cohomology() {
    let (l, a) = setup();
    let c = cohomology_summary(&l, &a).unwrap();
    assert_eq!(c.projective, z2(3));
    assert_eq!(c.affine, z2(4));
    assert!(c.rho_projective.is_trivial());
    assert!(c.rho_affine.is_trivial());
    assert!(c.sigma_on_rho_invariants_projective.is_trivial());
    assert_eq!(c.sigma_on_rho_invariants_affine, z2(1));
}

#[test]
fn cyclic_and_presented_computations_agree() {
    let (_, a) = setup();
    for (g, n) in [(&a.sigma, 4u32), (&a.tau, 2), (&a.rho, 2)] {
        let word = vec![0usize; n as usize];
        assert_eq!(h1_cyclic(g, n).unwrap(), h1_group(&[g], &[word]).unwrap());
    }
    assert!(h1_cyclic(&a.sigma, 2).is_err());
}

#[test]
fn trivial_action_has_trivial_h1() {
    let id = IntMatrix::identity(18);
    assert!(h1_group(&[&id, &id, &id], &relators()).unwrap().is_trivial());
    // the sign representation of Z/2 has H^1 = Z/2
    let minus = IntMatrix::from_rows(&[[-1]]);
    assert_eq!(h1_cyclic(&minus, 2).unwrap(), z2(1));
}

#[test]
fn half_sum_candidates() {
    let (l, _) = setup();
    let c = sublattice_index_check(&l).unwrap();
    assert_eq!(c.len(), 3);
    let e2: Vec<BigRational> = c.iter().map(|h| h.self_intersection.clone()).collect();
    for v in [2, -1, 5] {
        assert!(e2.contains(&BigRational::from_integer(v.into())));
    }
    for h in &c {
        match &h.verdict {
            HalfSumVerdict::OddSelfIntersection => assert!(h.self_intersection.to_integer() % 2 != BigInt::from(0)),
            HalfSumVerdict::DisjointCurves { count } => {
                assert_eq!(h.self_intersection, BigRational::from_integer(2.into()));
                assert_eq!(*count, 4);
                // the residual curves are pairwise disjoint (-2)-curves
                for a in &h.residual_curves {
                    for b in &h.residual_curves {
                        assert_eq!(geometric_pairing(*a, *b), if a == b { -2 } else { 0 });
                    }
                }
            }
            HalfSumVerdict::Undecided => panic!("undecided candidate {:?}", h.members),
        }
    }
}

#[test]
fn even_candidate_rewrites_with_four_conjugate_lines() {
    let (l, _) = setup();
    // 2E - 2 D3 - 2 l23-- is the sum of the four lbar12 lines
    let two_e = l
        .combination(&[(1, "D2"), (1, "D3"), (1, "l13++"), (1, "l23++"), (1, "l13-+"), (1, "l23--"), (1, "lbar12++"), (1, "lbar12-+")])
        .unwrap();
    let rest = l.combination(&[(2, "D3"), (2, "l23--")]).unwrap();
    let lines = l.combination(&[(1, "lbar12++"), (1, "lbar12+-"), (1, "lbar12-+"), (1, "lbar12--")]).unwrap();
    let lhs: Vec<i64> = two_e.iter().zip(&rest).map(|(a, b)| a - b).collect();
    assert_eq!(lhs, lines);
}

#[test]
fn fiber_involutions_are_isometric() {
    for c in involution_isometry_check() {
        assert!(c.isometry && c.involutive, "{c:?}");
    }
    let bad = IntMatrix::from_rows(&[[1, 1, 0], [0, 1, 0], [0, 0, 1]]);
    assert!(!check_involution("shear", &bad).isometry);
}

#[test]
fn discrepancies_are_reported() {
    let (l, a) = setup();
    let r = discrepancy_report(&l, &a).unwrap();
    assert!(r.has_discrepancies());
    assert!(!r.displayed_sigma_block_is_isometry);
    assert!(!r.displayed_sigma_block_matches);
    assert!(r.reconstructed_sigma_block_stable);
    let failing: Vec<&str> = r.relations.iter().filter(|c| !c.holds).map(|c| c.relation.as_str()).collect();
    assert_eq!(failing, ["C1-- = C1+-", "C2-- = C2+-", "C3-- = C3+-"]);
    for k in &r.kernels {
        assert!(k.contained && k.index == Some(1), "{k:?}");
    }
}

/// Random unimodular matrix with its inverse, from elementary operations.
fn unimodular(ops: &[(usize, usize, i64)], n: usize) -> (IntMatrix, IntMatrix) {
    let mut q = IntMatrix::identity(n);
    let mut qi = IntMatrix::identity(n);
    for &(i, j, c) in ops {
        if i == j {
            continue;
        }
        let e = IntMatrix::from_fn(n, n, |r, s| BigInt::from(i64::from(r == s) + if (r, s) == (i, j) { c } else { 0 }));
        let ei = IntMatrix::from_fn(n, n, |r, s| BigInt::from(i64::from(r == s) - if (r, s) == (i, j) { c } else { 0 }));
        q = q.mul(&e);
        qi = ei.mul(&qi);
    }
    (q, qi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn h1_is_basis_independent(ops in prop::collection::vec((0usize..18, 0usize..18, -2i64..=2), 1..25)) {
        let (_, a) = setup();
        let (q, qi) = unimodular(&ops, 18);
        prop_assert!(q.mul(&qi).is_identity());
        let b = a.conjugate(&q, &qi);
        prop_assert!(b.presentation_holds());
        prop_assert_eq!(b.h1().unwrap(), z2(3));
    }

    #[test]
    fn generators_are_isometries_of_random_classes(u in prop::collection::vec(-3i64..=3, 18), v in prop::collection::vec(-3i64..=3, 18)) {
        let (l, a) = setup();
        let col = |x: &[i64]| IntMatrix::column_vector(&x.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>());
        for g in a.generators() {
            let gu = g.mul(&col(&u)).transpose();
            let gv = g.mul(&col(&v));
            let lhs = gu.mul(&l.gram).mul(&gv);
            let rhs = col(&u).transpose().mul(&l.gram).mul(&col(&v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
