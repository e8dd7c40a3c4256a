//! Parameter censuses: how many `k` up to a bound satisfy a profile, and how
//! many of the obstruction-profile surfaces are confirmed to be
//! counterexamples to the integral Hasse principle.

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{primes_up_to, DEFAULT_FACTOR_DIGITS};
use crate::brauer::{obstruction_for_profile, Verdict};
use crate::local_points::{everywhere_locally_solvable, AssumptionProfile, Parameterization, ProfileError, ProfileId, Quantity};
use crate::surfaces::{FamilyId, Surface};

/// Default cap on the number of verified census rows.
pub const DEFAULT_ROW_BUDGET: usize = 500;

/// Column names of the census CSV.
pub const CSV_HEADER: [&str; 6] = ["family", "ell", "k", "solvable", "obstructed", "inconclusive"];

/// Which parameters `l` are enumerated for the `l`-derived profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CensusMode {
    AllIntegers,
    PrimeEll,
}

/// Count of admissible parameters for one profile up to `|k| <= M`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCount {
    pub profile: ProfileId,
    pub max_m: u64,
    pub mode: CensusMode,
    pub count: u64,
    /// `count / M`.
    pub ratio: f64,
    /// `count * log M / sqrt M`.
    pub log_ratio: f64,
    /// For profiles given by congruences on `k` alone: the density of the
    /// admissible residues, to compare with `count / (2M + 1)`.
    pub predicted_density: Option<f64>,
    pub observed_density: Option<f64>,
}

/// Density of the residues allowed by congruences on `k`, when the
/// profile has no other conditions.
pub fn congruence_density(prof: &AssumptionProfile) -> Option<f64> {
    if prof.parameterization != Parameterization::KDirect || !prof.prime_conditions.is_empty() || prof.congruences.iter().any(|c| c.on != Quantity::K) {
        return None;
    }
    let lcm = prof.congruences.iter().fold(1u64, |l, c| num_integer::lcm(l, c.modulus));
    let good = (0..lcm as i64).filter(|&r| prof.congruences_hold(r, r).is_none()).count();
    Some(good as f64 / lcm as f64)
}

fn parameters(prof: &AssumptionProfile, max_m: u64, mode: CensusMode) -> Vec<i64> {
    let m = max_m as i64;
    match prof.parameterization {
        Parameterization::KDirect => (-m..=m).collect(),
        Parameterization::EllDerived => {
            let fits = |l: i64| prof.id.k_from_parameter(l).map_or(true, |k| k.unsigned_abs() <= max_m);
            // |k| grows with l, but non-integral k (odd/even l) must not stop the scan
            let c = prof.id.quadratic_coefficient().max(1.0);
            let top = ((max_m as f64 / c).sqrt() as i64 + 2).max(1);
            let ells: Vec<i64> = match mode {
                CensusMode::AllIntegers => (1..=top).collect(),
                CensusMode::PrimeEll => primes_up_to(top as u64).into_iter().map(|p| p as i64).collect(),
            };
            ells.into_iter().filter(|&l| fits(l) && prof.id.k_from_parameter(l).is_ok()).collect()
        }
    }
}

/// Number of admissible parameters of a profile with `|k| <= M`.
pub fn admissible_count_for(prof: &AssumptionProfile, max_m: u64, mode: CensusMode) -> Result<ProfileCount, ProfileError> {
    let params = parameters(prof, max_m, mode);
    let passed: Vec<bool> = params.par_iter().map(|&v| prof.check(v, DEFAULT_FACTOR_DIGITS).map(|o| o.passed)).collect::<Result<_, _>>()?;
    let count = passed.iter().filter(|&&b| b).count() as u64;
    let m = max_m.max(2) as f64;
    let predicted_density = congruence_density(prof);
    Ok(ProfileCount {
        profile: prof.id,
        max_m,
        mode,
        count,
        ratio: count as f64 / m,
        log_ratio: count as f64 * m.ln() / m.sqrt(),
        observed_density: (prof.parameterization == Parameterization::KDirect).then(|| count as f64 / (2 * max_m + 1) as f64),
        predicted_density,
    })
}

pub fn admissible_count(profile: ProfileId, max_m: u64, mode: CensusMode) -> Result<ProfileCount, ProfileError> {
    admissible_count_for(&profile.profile(), max_m, mode)
}

/// Counts along a ladder of bounds.
pub fn density_ladder(profile: ProfileId, ladder: &[u64], mode: CensusMode) -> Result<Vec<ProfileCount>, ProfileError> {
    ladder.iter().map(|&m| admissible_count(profile, m, mode)).collect()
}

/// One surface of the obstruction profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub family: FamilyId,
    pub ell: i64,
    pub k: i64,
    pub solvable: bool,
    pub obstructed: bool,
    pub inconclusive: bool,
}

impl CensusRow {
    pub fn csv_record(&self) -> [String; 6] {
        [self.family.to_string(), self.ell.to_string(), self.k.to_string(), self.solvable.to_string(), self.obstructed.to_string(), self.inconclusive.to_string()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub mode: CensusMode,
    /// Run local solvability and the obstruction computation on each row.
    /// Otherwise rows carry the flags implied by the profiles.
    pub verify: bool,
    pub prime_bound: u64,
    pub depth: u32,
    pub row_budget: usize,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { mode: CensusMode::AllIntegers, verify: false, prime_bound: 50, depth: 5, row_budget: DEFAULT_ROW_BUDGET }
    }
}

/// Census of the obstruction profile of a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HasseCensus {
    pub family: FamilyId,
    pub profile: ProfileId,
    pub max_m: u64,
    pub mode: CensusMode,
    pub verified: bool,
    pub rows_total: usize,
    /// Rows beyond the budget were dropped.
    pub truncated: bool,
    /// Rows that are locally solvable and obstructed.
    pub failures: u64,
    pub inconclusive: u64,
    pub ratio: f64,
    pub log_ratio: f64,
    #[serde(skip)]
    pub rows: Vec<CensusRow>,
}

pub fn hasse_failure_census(family: FamilyId, max_m: u64, opts: CensusOptions) -> Result<HasseCensus, ProfileError> {
    let id = ProfileId::obstruction_for(family);
    let prof = id.profile();
    let params = parameters(&prof, max_m, opts.mode);
    let mut admissible = Vec::new();
    for l in params {
        let o = prof.check(l, DEFAULT_FACTOR_DIGITS)?;
        if o.passed {
            admissible.push((l, o.k.expect("passing parameters have integral k")));
        }
    }
    let rows_total = admissible.len();
    let truncated = rows_total > opts.row_budget;
    admissible.truncate(opts.row_budget);
    let mut rows: Vec<CensusRow> = admissible
        .par_iter()
        .map(|&(ell, k)| {
            if !opts.verify {
                return CensusRow { family, ell, k, solvable: true, obstructed: true, inconclusive: false };
            }
            let s = Surface::new(family, k);
            let local = everywhere_locally_solvable(&s, opts.prime_bound);
            let solvable = local.locally_solvable && local.profile.as_ref().is_some_and(|p| p.passed);
            match obstruction_for_profile(id, ell, opts.prime_bound, opts.depth) {
                Ok(r) => CensusRow { family, ell, k, solvable, obstructed: r.verdict == Verdict::Obstructed, inconclusive: r.verdict == Verdict::Inconclusive },
                Err(_) => CensusRow { family, ell, k, solvable, obstructed: false, inconclusive: true },
            }
        })
        .collect();
    rows.sort_by_key(|r| (r.k.unsigned_abs(), r.ell));
    let failures = rows.iter().filter(|r| r.solvable && r.obstructed && !r.inconclusive).count() as u64;
    let inconclusive = rows.iter().filter(|r| r.inconclusive).count() as u64;
    let m = max_m.max(2) as f64;
    Ok(HasseCensus {
        family,
        profile: id,
        max_m,
        mode: opts.mode,
        verified: opts.verify,
        rows_total,
        truncated,
        failures,
        inconclusive,
        ratio: failures as f64 / m,
        log_ratio: failures as f64 * m.ln() / m.sqrt(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_of_the_f1_profile() {
        let d = congruence_density(&ProfileId::SolvableF1.profile()).unwrap();
        assert!((d - (1.0 / 8.0) * (2.0 / 3.0) * (4.0 / 5.0) * (6.0 / 7.0)).abs() < 1e-12);
        assert!(congruence_density(&ProfileId::SolvableF2.profile()).is_none());
        assert!(congruence_density(&ProfileId::ObstructF1.profile()).is_none());
    }

    #[test]
    fn ell_ranges_respect_the_bound() {
        for id in [ProfileId::ObstructF1, ProfileId::ObstructF2, ProfileId::ObstructF3, ProfileId::ProductF3Odd] {
            for l in parameters(&id.profile(), 5000, CensusMode::AllIntegers) {
                assert!(id.k_from_parameter(l).unwrap().unsigned_abs() <= 5000);
            }
        }
        assert_eq!(parameters(&ProfileId::ObstructF1.profile(), 17, CensusMode::AllIntegers), vec![1]);
        assert!(parameters(&ProfileId::ObstructF1.profile(), 17, CensusMode::PrimeEll).is_empty());
    }
}
