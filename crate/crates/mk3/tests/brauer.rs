use mk3::brauer::*;
use mk3::hilbert::{HalfInvariant, Place};
use mk3::local_points::ProfileId;
use mk3::surfaces::{integral_point_search, FamilyId, Surface};
use std::collections::BTreeSet;

const Z: HalfInvariant = HalfInvariant::ZERO;
const H: HalfInvariant = HalfInvariant::HALF;

/// An obstructed verdict must survive a deeper scan and a larger prime
/// bound, and no integral point may turn up in a moderate box.
fn assert_stable_obstruction(id: ProfileId, ell: i64) {
    let base = obstruction_for_profile(id, ell, 200, 5).unwrap();
    let deeper = obstruction_for_profile(id, ell, 200, 6).unwrap();
    let wider = obstruction_for_profile(id, ell, 400, 5).unwrap();
    assert_eq!(deeper.verdict, Verdict::Obstructed);
    assert_eq!(wider.verdict, Verdict::Obstructed);
    for pl in &base.critical_places {
        assert_eq!(vectors(deeper.place(pl.place).unwrap()), vectors(pl), "{:?}", pl.place);
    }
    assert!(integral_point_search(&base.surface, 150).points.is_empty());
}

fn set(v: &[&[HalfInvariant]]) -> BTreeSet<Vec<HalfInvariant>> {
    v.iter().map(|x| x.to_vec()).collect()
}

fn vectors(pi: &PlaceInvariants) -> BTreeSet<Vec<HalfInvariant>> {
    pi.vectors.iter().cloned().collect()
}

#[test]
fn f1_reference_case_is_obstructed() {
    let r = obstruction_for_profile(ProfileId::ObstructF1, 1, 200, 5).unwrap();
    assert_eq!(r.verdict, Verdict::Obstructed, "{:#?}", r.critical_places);
    assert_eq!(vectors(r.place(Place::Prime(2)).unwrap()), set(&[&[H]]));
    assert!(r.zero_away_from(&[Place::Prime(2)]));
}

#[test]
fn f2_reference_case_is_obstructed() {
    let r = obstruction_for_profile(ProfileId::ObstructF2, 191, 200, 5).unwrap();
    assert_eq!(r.verdict, Verdict::Obstructed, "{:#?}", r.critical_places);
    assert_eq!(vectors(r.place(Place::Prime(2)).unwrap()), set(&[&[H, H], &[Z, H], &[H, Z]]));
    assert!(r.zero_away_from(&[Place::Prime(2)]));
}

#[test]
fn f3_reference_case_is_obstructed() {
    let r = obstruction_for_profile(ProfileId::ObstructF3, 241, 200, 5).unwrap();
    assert_eq!(r.verdict, Verdict::Obstructed, "{:#?}", r.critical_places);
    assert_eq!(vectors(r.place(Place::Prime(3)).unwrap()), set(&[&[H, H]]));
    assert_eq!(vectors(r.place(Place::Prime(2)).unwrap()), set(&[&[Z, Z], &[Z, H], &[H, Z]]));
    assert!(r.zero_away_from(&[Place::Prime(2), Place::Prime(3)]));
}

#[test]
fn strong_approximation_failures() {
    for (f, k, cl) in [(FamilyId::F2, 574, QuaternionClass::f2_a1()), (FamilyId::F3, -2911, QuaternionClass::f3_a1())] {
        let r = strong_approximation_failure(&Surface::new(f, k), &cl, 5, 20).unwrap();
        assert!(r.failure_exhibited, "{r:#?}");
        assert_eq!(r.invariants_at_2, vec![Z, H]);
        assert_eq!(r.witnesses.len(), 2);
    }
    let r = strong_approximation_failure(&Surface::new(FamilyId::F1, -17), &QuaternionClass::f1_a(), 5, 20).unwrap();
    assert!(!r.failure_exhibited);
    assert_eq!(r.invariants_at_2, vec![H]);
}

#[test]
fn rational_witnesses() {
    let r = rational_bm_witness(&Surface::new(FamilyId::F1, -17), &[QuaternionClass::f1_a()], 2, 50, 5).unwrap();
    assert!(r.found);
    assert!(r.has_pattern([-1, -3, 0]));
}

#[test]
fn rational_witnesses_at_three() {
    let cls = QuaternionClass::for_profile(ProfileId::ObstructF2);
    let r = rational_bm_witness(&Surface::new(FamilyId::F2, 656658), &cls, 3, 200, 5).unwrap();
    assert!(r.found);
    assert!(r.points.iter().any(|p| p.valuations == [0, 0, -1] && p.vector == vec![H, H]));
    let cls = QuaternionClass::for_profile(ProfileId::ObstructF3);
    let r = rational_bm_witness(&Surface::new(FamilyId::F3, -392047), &cls, 3, 200, 5).unwrap();
    assert!(r.points.iter().any(|p| p.valuations[0] < 0 && p.valuations[1] < 0 && p.valuations[2] == 0 && p.vector == vec![Z, Z]));
}

#[test]
fn product_profile_with_three_mod_eight_is_unobstructed() {
    let r = obstruction_for_profile(ProfileId::ProductF3Even, 2731, 200, 5).unwrap();
    assert_eq!(r.verdict, Verdict::NotObstructedWithWitness);
    for pl in &r.critical_places {
        assert!(pl.complete && pl.is_zero(), "{:?}", pl.place);
    }
}

#[test]
fn product_profile_with_five_mod_eight_is_obstructed() {
    let r = obstruction_for_profile(ProfileId::ProductF3Odd, 12181, 200, 5).unwrap();
    assert_eq!(r.verdict, Verdict::Obstructed);
    let two = r.place(Place::Prime(2)).unwrap();
    assert_eq!(vectors(two), set(&[&[Z, H], &[H, Z], &[H, H]]));
    for pl in r.critical_places.iter().filter(|p| p.place != Place::Prime(2)) {
        assert!(pl.is_zero(), "{:?}", pl.place);
    }
}

#[test]
fn obstructed_verdicts_are_stable() {
    for (id, ell) in [(ProfileId::ObstructF1, 1), (ProfileId::ObstructF2, 191), (ProfileId::ObstructF3, 241)] {
        assert_stable_obstruction(id, ell);
    }
}

#[test]
fn invariant_set_at_three_for_the_f3_case() {
    let r = invariant_set(&[QuaternionClass::f3_a1()], &Surface::new(FamilyId::F3, -392047), 3, 3).unwrap();
    assert_eq!(vectors(&r), set(&[&[H]]));
}

#[test]
fn small_product_parameter_is_rejected() {
    let out = mk3::local_points::assumption_check(ProfileId::ProductF3Even, 3).unwrap();
    assert!(!out.passed);
    assert_eq!(out.k, Some(12));
}
