use std::time::Instant;

use mk3::census::*;
use mk3::local_points::{Congruence, ProfileId, Quantity};
use mk3::surfaces::FamilyId;

fn within(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b
}

#[test]
fn f1_density_matches_the_congruence_product() {
    let expected = (1.0 / 8.0) * (2.0 / 3.0) * (4.0 / 5.0) * (6.0 / 7.0);
    for m in [10_000u64, 100_000] {
        let c = admissible_count(ProfileId::SolvableF1, m, CensusMode::AllIntegers).unwrap();
        assert_eq!(c.predicted_density, Some(expected));
        assert!(within(c.observed_density.unwrap(), expected, 0.10), "{c:?}");
    }
}

#[test]
fn f3_density_matches_its_congruences() {
    let c = admissible_count(ProfileId::SolvableF3, 100_000, CensusMode::AllIntegers).unwrap();
    assert!(within(c.observed_density.unwrap(), c.predicted_density.unwrap(), 0.10), "{c:?}");
}

#[test]
fn doubling_ladder_is_stable() {
    let ladder = density_ladder(ProfileId::SolvableF1, &[10_000, 20_000, 40_000], CensusMode::AllIntegers).unwrap();
    for w in ladder.windows(2) {
        assert!(w[1].count >= w[0].count);
        assert!(within(w[1].ratio, w[0].ratio, 0.10), "{:?}", w);
    }
}

#[test]
fn counts_are_monotone_in_m() {
    for id in [ProfileId::ObstructF1, ProfileId::ObstructF3, ProfileId::SolvableF2] {
        let a = admissible_count(id, 1000, CensusMode::AllIntegers).unwrap().count;
        let b = admissible_count(id, 4000, CensusMode::AllIntegers).unwrap().count;
        assert!(a <= b, "{id:?}");
    }
}

#[test]
fn prime_mode_skips_ell_one() {
    assert_eq!(admissible_count(ProfileId::ObstructF1, 17, CensusMode::PrimeEll).unwrap().count, 0);
    assert_eq!(admissible_count(ProfileId::ObstructF1, 17, CensusMode::AllIntegers).unwrap().count, 1);
    // first admissible prime is 5, k = -401
    assert_eq!(admissible_count(ProfileId::ObstructF1, 401, CensusMode::PrimeEll).unwrap().count, 1);
}

#[test]
fn contradictory_profile_counts_nothing() {
    let mut prof = ProfileId::SolvableF1.profile();
    prof.congruences.push(Congruence { on: Quantity::K, modulus: 8, allowed: vec![1], text: "k = 1 mod 8".into() });
    let c = admissible_count_for(&prof, 10, CensusMode::AllIntegers).unwrap();
    assert_eq!(c.count, 0);
    assert_eq!(c.predicted_density, Some(0.0));
}

#[test]
fn f1_census_contains_the_first_counterexample() {
    let t0 = Instant::now();
    let opts = CensusOptions { verify: true, prime_bound: 50, ..CensusOptions::default() };
    let c = hasse_failure_census(FamilyId::F1, 20, opts).unwrap();
    assert_eq!(c.rows, vec![CensusRow { family: FamilyId::F1, ell: 1, k: -17, solvable: true, obstructed: true, inconclusive: false }]);
    assert_eq!(c.failures, 1);
    eprintln!("f1 census: {:?}", t0.elapsed());
}

#[test]
fn f2_census_is_empty_below_the_first_parameter() {
    for mode in [CensusMode::AllIntegers, CensusMode::PrimeEll] {
        let c = hasse_failure_census(FamilyId::F2, 1000, CensusOptions { mode, ..CensusOptions::default() }).unwrap();
        assert!(c.rows.is_empty());
        assert_eq!(c.failures, 0);
    }
    let c = hasse_failure_census(FamilyId::F2, 656_658, CensusOptions::default()).unwrap();
    assert_eq!(c.rows.iter().map(|r| r.ell).collect::<Vec<_>>(), vec![191]);
}

#[test]
fn f3_profile_census_reaches_ell_241() {
    let c = hasse_failure_census(FamilyId::F3, 400_000, CensusOptions { mode: CensusMode::PrimeEll, ..CensusOptions::default() }).unwrap();
    assert!(c.rows.iter().any(|r| r.ell == 241 && r.k == -392047), "{:?}", c.rows);
    for r in &c.rows {
        assert_eq!(ProfileId::ObstructF3.k_from_parameter(r.ell).unwrap(), r.k);
    }
}

#[test]
fn row_budget_truncates() {
    let c = hasse_failure_census(FamilyId::F1, 10_000_000, CensusOptions { row_budget: 3, ..CensusOptions::default() }).unwrap();
    assert_eq!(c.rows.len(), 3);
    assert!(c.truncated && c.rows_total > 3);
    assert!(c.rows.windows(2).all(|w| w[0].k.unsigned_abs() <= w[1].k.unsigned_abs()));
}
