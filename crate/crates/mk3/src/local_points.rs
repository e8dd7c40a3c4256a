//! Local solvability: congruence profiles on the parameter, real witnesses
//! and Newton-certified residue witnesses at every prime up to a bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::arith::{factor_big, primes_up_to, ArithError, DEFAULT_FACTOR_DIGITS};
use crate::padic::ResidueWitness;
use crate::scan::{ResidueScanner, DEFAULT_NODE_BUDGET};
use crate::surfaces::{AffinePoint, FamilyId, Surface};

/// Deepest residue level tried when looking for a local witness.
pub const MAX_WITNESS_DEPTH: u32 = 6;

/// Largest `p^(2j)` for which the exhaustive lexicographic scan is attempted.
const LEX_SCAN_LIMIT: u64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("unknown profile {0:?}")]
    Unknown(String),
    #[error("parameter {value} does not give an integer k for profile {profile}")]
    NonIntegralK { profile: ProfileId, value: i64 },
    #[error("k overflows a 64-bit integer for parameter {0}")]
    Overflow(i64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// The named parameter profiles: three congruence conditions on `k` that
/// force local solvability, and five families `k = k(l)` used for
/// obstruction statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProfileId {
    SolvableF1,
    SolvableF2,
    SolvableF3,
    ObstructF1,
    ObstructF2,
    ObstructF3,
    ProductF3Odd,
    ProductF3Even,
}

impl ProfileId {
    pub const ALL: [ProfileId; 8] = [
        ProfileId::SolvableF1,
        ProfileId::SolvableF2,
        ProfileId::SolvableF3,
        ProfileId::ObstructF1,
        ProfileId::ObstructF2,
        ProfileId::ObstructF3,
        ProfileId::ProductF3Odd,
        ProfileId::ProductF3Even,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProfileId::SolvableF1 => "solvable-f1",
            ProfileId::SolvableF2 => "solvable-f2",
            ProfileId::SolvableF3 => "solvable-f3",
            ProfileId::ObstructF1 => "thm44",
            ProfileId::ObstructF2 => "thm45",
            ProfileId::ObstructF3 => "thm46",
            ProfileId::ProductF3Odd => "prop51",
            ProfileId::ProductF3Even => "prop52",
        }
    }

    pub fn family(self) -> FamilyId {
        match self {
            ProfileId::SolvableF1 | ProfileId::ObstructF1 => FamilyId::F1,
            ProfileId::SolvableF2 | ProfileId::ObstructF2 => FamilyId::F2,
            _ => FamilyId::F3,
        }
    }

    /// The obstruction profile of a family.
    pub fn obstruction_for(f: FamilyId) -> ProfileId {
        match f {
            FamilyId::F1 => ProfileId::ObstructF1,
            FamilyId::F2 => ProfileId::ObstructF2,
            FamilyId::F3 => ProfileId::ObstructF3,
        }
    }

    /// The local solvability profile of a family.
    pub fn solvability_for(f: FamilyId) -> ProfileId {
        match f {
            FamilyId::F1 => ProfileId::SolvableF1,
            FamilyId::F2 => ProfileId::SolvableF2,
            FamilyId::F3 => ProfileId::SolvableF3,
        }
    }

    pub fn parameterization(self) -> Parameterization {
        match self {
            ProfileId::SolvableF1 | ProfileId::SolvableF2 | ProfileId::SolvableF3 => Parameterization::KDirect,
            _ => Parameterization::EllDerived,
        }
    }

    /// `k` as a function of the profile parameter.
    pub fn k_from_parameter(self, v: i64) -> Result<i64, ProfileError> {
        let l = v as i128;
        let k: i128 = match self {
            ProfileId::SolvableF1 | ProfileId::SolvableF2 | ProfileId::SolvableF3 => l,
            ProfileId::ObstructF1 => -(1 + 16 * l * l),
            ProfileId::ObstructF2 => 18 * l * l,
            ProfileId::ObstructF3 => {
                let n = 1 + 27 * l * l;
                if n % 4 != 0 {
                    return Err(ProfileError::NonIntegralK { profile: self, value: v });
                }
                -(n / 4)
            }
            ProfileId::ProductF3Odd | ProfileId::ProductF3Even => l * (l + 1),
        };
        i64::try_from(k).map_err(|_| ProfileError::Overflow(v))
    }

    /// Leading coefficient `c` of `|k| ~ c l^2`, used to size parameter ranges.
    pub fn quadratic_coefficient(self) -> f64 {
        match self {
            ProfileId::ObstructF1 => 16.0,
            ProfileId::ObstructF2 => 18.0,
            ProfileId::ObstructF3 => 6.75,
            ProfileId::ProductF3Odd | ProfileId::ProductF3Even => 1.0,
            _ => 0.0,
        }
    }

    pub fn profile(self) -> AssumptionProfile {
        use Quantity::*;
        let cong = |on, modulus, allowed: &[u64], text: &str| Congruence { on, modulus, allowed: allowed.to_vec(), text: text.to_string() };
        let nonzero = |on, modulus: u64, text: &str| Congruence { on, modulus, allowed: (1..modulus).collect(), text: text.to_string() };
        let excluding = |on, modulus: u64, bad: &[u64], text: &str| Congruence {
            on,
            modulus,
            allowed: (0..modulus).filter(|r| !bad.contains(r)).collect(),
            text: text.to_string(),
        };
        let (congruences, prime_conditions) = match self {
            ProfileId::SolvableF1 => (
                vec![
                    cong(K, 8, &[7], "k = -1 mod 8"),
                    nonzero(K, 3, "k != 0 mod 3"),
                    nonzero(K, 5, "k != 0 mod 5"),
                    nonzero(K, 7, "k != 0 mod 7"),
                ],
                vec![],
            ),
            ProfileId::SolvableF2 => (
                vec![
                    cong(K, 8, &[2], "k = 2 mod 8"),
                    cong(K, 27, &[18], "k = -9 mod 27"),
                    cong(K, 5, &[3], "k = -2 mod 5"),
                    cong(K, 7, &[2], "k = 2 mod 7"),
                ],
                vec![PrimeDivisorCondition { of: K, modulus: 8, allowed: vec![1, 7], exempt: vec![2, 3], text: "odd prime divisors p != 3 of k satisfy p = +-1 mod 8".into() }],
            ),
            ProfileId::SolvableF3 => (
                vec![
                    cong(K, 4, &[1], "k = 1 mod 4"),
                    cong(K, 3, &[2], "k = 2 mod 3"),
                    cong(K, 5, &[3], "k = 3 mod 5"),
                    excluding(K, 7, &[0, 5], "k != 0, -2 mod 7"),
                    nonzero(K, 37, "k != 0 mod 37"),
                ],
                vec![],
            ),
            ProfileId::ObstructF1 => (
                vec![cong(Ell, 2, &[1], "l odd"), excluding(Ell, 5, &[2, 3], "l != +-2 mod 5")],
                vec![PrimeDivisorCondition { of: Ell, modulus: 4, allowed: vec![1], exempt: vec![], text: "prime divisors of l are 1 mod 4".into() }],
            ),
            ProfileId::ObstructF2 => (
                vec![
                    nonzero(Ell, 2, "l != 0 mod 2"),
                    nonzero(Ell, 3, "l != 0 mod 3"),
                    cong(Ell, 5, &[1], "l = 1 mod 5"),
                    cong(Ell, 7, &[2], "l = 2 mod 7"),
                ],
                vec![PrimeDivisorCondition { of: Ell, modulus: 8, allowed: vec![1, 7], exempt: vec![], text: "prime divisors of l are +-1 mod 8".into() }],
            ),
            ProfileId::ObstructF3 => (
                vec![
                    cong(Ell, 8, &[1, 7], "l = +-1 mod 8"),
                    cong(Ell, 5, &[1], "l = 1 mod 5"),
                    cong(Ell, 7, &[3], "l = 3 mod 7"),
                    excluding(Ell, 37, &[10, 27], "l != +-10 mod 37"),
                ],
                vec![PrimeDivisorCondition { of: Ell, modulus: 24, allowed: vec![1, 23], exempt: vec![], text: "prime divisors of l are +-1 mod 24".into() }],
            ),
            ProfileId::ProductF3Odd | ProfileId::ProductF3Even => {
                let r = if self == ProfileId::ProductF3Odd { 5 } else { 3 };
                (
                    vec![
                        cong(Ell, 8, &[r], if r == 5 { "l = 5 mod 8" } else { "l = 3 mod 8" }),
                        cong(Ell, 27, &[4], "l = 4 mod 27"),
                        cong(Ell, 35, &[1], "l = 1 mod 35"),
                        excluding(Ell, 37, &[0, 36], "l != 0, -1 mod 37"),
                    ],
                    vec![PrimeDivisorCondition {
                        of: TwoEllPlusOne,
                        modulus: 8,
                        allowed: vec![1, 3, 7],
                        exempt: vec![],
                        text: "prime divisors of 2l+1 are +-1, 3 mod 8".into(),
                    }],
                )
            }
        };
        AssumptionProfile { id: self, family: self.family(), parameterization: self.parameterization(), congruences, prime_conditions }
    }
}

impl fmt::Display for ProfileId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProfileId {
    type Err = ProfileError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        ProfileId::ALL.into_iter().find(|p| p.name() == t).ok_or(ProfileError::Unknown(s.to_string()))
    }
}

impl Serialize for ProfileId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parameterization {
    KDirect,
    EllDerived,
}

/// The integer a condition is stated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    K,
    Ell,
    TwoEllPlusOne,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Congruence {
    pub on: Quantity,
    pub modulus: u64,
    pub allowed: Vec<u64>,
    pub text: String,
}

/// Every prime divisor of the stated quantity, other than the exempt
/// primes, must lie in the allowed residue classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeDivisorCondition {
    pub of: Quantity,
    pub modulus: u64,
    pub allowed: Vec<u64>,
    pub exempt: Vec<u64>,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionProfile {
    pub id: ProfileId,
    pub family: FamilyId,
    pub parameterization: Parameterization,
    pub congruences: Vec<Congruence>,
    pub prime_conditions: Vec<PrimeDivisorCondition>,
}

/// Result of checking a parameter against a profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssumptionOutcome {
    pub profile: ProfileId,
    pub parameter: i64,
    pub k: Option<i64>,
    pub passed: bool,
    pub first_violation: Option<String>,
}

impl AssumptionProfile {
    fn quantity(&self, q: Quantity, v: i64, k: i64) -> i128 {
        match q {
            Quantity::K => k as i128,
            Quantity::Ell => v as i128,
            Quantity::TwoEllPlusOne => 2 * v as i128 + 1,
        }
    }

    /// Check the congruence conditions only.
    pub fn congruences_hold(&self, v: i64, k: i64) -> Option<&Congruence> {
        self.congruences.iter().find(|c| {
            let r = self.quantity(c.on, v, k).rem_euclid(c.modulus as i128) as u64;
            !c.allowed.contains(&r)
        })
    }
}

/// Check a parameter (`k` for the solvability profiles, `l` otherwise)
/// against a profile, reporting the first violated condition.
pub fn assumption_check(id: ProfileId, v: i64) -> Result<AssumptionOutcome, ProfileError> {
    assumption_check_with(id, v, DEFAULT_FACTOR_DIGITS)
}

/// As [`assumption_check`] with an explicit factorization digit bound.
pub fn assumption_check_with(id: ProfileId, v: i64, max_digits: usize) -> Result<AssumptionOutcome, ProfileError> {
    id.profile().check(v, max_digits)
}

impl AssumptionProfile {
    /// Check a parameter against every condition of the profile.
    pub fn check(&self, v: i64, max_digits: usize) -> Result<AssumptionOutcome, ProfileError> {
        let id = self.id;
        let fail = |k: Option<i64>, why: String| Ok(AssumptionOutcome { profile: id, parameter: v, k, passed: false, first_violation: Some(why) });
        let k = match id.k_from_parameter(v) {
            Ok(k) => k,
            Err(ProfileError::NonIntegralK { .. }) => return fail(None, "k is not an integer".into()),
            Err(e) => return Err(e),
        };
        if let Some(c) = self.congruences_hold(v, k) {
            return fail(Some(k), c.text.clone());
        }
        for c in &self.prime_conditions {
            let n = self.quantity(c.of, v, k);
            if n == 0 {
                return fail(Some(k), format!("{} (quantity is zero)", c.text));
            }
            for (p, _) in factor_big(&BigInt::from(n), max_digits)? {
                let p: u64 = p.try_into().expect("factor of a 128-bit integer below the digit bound");
                if c.exempt.contains(&p) {
                    continue;
                }
                if !c.allowed.contains(&(p % c.modulus)) {
                    return fail(Some(k), format!("{} (violated by {p})", c.text));
                }
            }
        }
        Ok(AssumptionOutcome { profile: id, parameter: v, k: Some(k), passed: true, first_violation: None })
    }
}

/// The one-parameter curve along which a real witness is sought.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RealAnsatz {
    /// `(t, t, t)`.
    Diagonal,
    /// `(t, 0, 0)`.
    Axis,
    /// `(t, 1, 0)`.
    AxisUnit,
}

impl RealAnsatz {
    fn point(self, t: &BigRational) -> AffinePoint {
        let zero = BigRational::zero();
        match self {
            RealAnsatz::Diagonal => AffinePoint::new(t.clone(), t.clone(), t.clone()),
            RealAnsatz::Axis => AffinePoint::new(t.clone(), zero.clone(), zero),
            RealAnsatz::AxisUnit => AffinePoint::new(t.clone(), BigRational::one(), zero),
        }
    }
}

/// A real point on the surface: exact, or a bracketing interval for the
/// parameter `t` of the ansatz across which the equation changes sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RealWitness {
    pub ansatz: RealAnsatz,
    #[serde(serialize_with = "crate::serialize_rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "crate::serialize_rational")]
    pub hi: BigRational,
    pub exact: Option<AffinePoint>,
}

impl RealWitness {
    /// Re-check the certificate: an exact point lies on the surface, or the
    /// equation takes values of opposite signs at the ends of the interval.
    pub fn verify(&self, s: &Surface) -> bool {
        if let Some(p) = &self.exact {
            return s.evaluate(p).is_zero();
        }
        let a = s.evaluate(&self.ansatz.point(&self.lo));
        let b = s.evaluate(&self.ansatz.point(&self.hi));
        self.lo <= self.hi && !(a.is_positive() && b.is_positive()) && !(a.is_negative() && b.is_negative())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

/// Width below which bisection stops.
pub fn real_witness_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(1u64 << 20))
}

/// A real point of `s`, by exact rational root or by bisection over dyadics.
pub fn real_witness(s: &Surface) -> RealWitness {
    let ansatz = match (s.family, s.k < 0) {
        (FamilyId::F2, true) => RealAnsatz::AxisUnit,
        (_, true) => RealAnsatz::Diagonal,
        (_, false) => RealAnsatz::Axis,
    };
    let phi = |t: &BigRational| s.evaluate(&ansatz.point(t));
    let exact = |t: BigRational| RealWitness { ansatz, lo: t.clone(), hi: t.clone(), exact: Some(ansatz.point(&t)) };
    // Rational closed forms: t^2 = k on the axis, t^2 = (1 - k)/3 on the unit axis.
    let radicand = match ansatz {
        RealAnsatz::Axis => Some(BigRational::from_integer(BigInt::from(s.k))),
        RealAnsatz::AxisUnit => Some(BigRational::new(BigInt::from(1 - s.k), BigInt::from(3))),
        RealAnsatz::Diagonal => None,
    };
    if let Some(r) = &radicand {
        if let (Some(n), Some(d)) = (crate::arith::exact_sqrt(r.numer()), crate::arith::exact_sqrt(r.denom())) {
            return exact(BigRational::new(n, d));
        }
    }
    let mut lo = if ansatz == RealAnsatz::Diagonal { BigRational::one() } else { BigRational::zero() };
    let mut hi = &lo + BigRational::one();
    let sign_lo = phi(&lo).signum();
    if sign_lo.is_zero() {
        return exact(lo);
    }
    while (phi(&hi).signum() * &sign_lo).is_positive() {
        hi = &hi * BigRational::from_integer(2.into());
    }
    let tol = real_witness_tolerance();
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / &two;
        let v = phi(&mid);
        if v.is_zero() {
            return exact(mid);
        }
        if (v.signum() * &sign_lo).is_positive() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if phi(&hi).is_zero() {
        return exact(hi);
    }
    RealWitness { ansatz, lo, hi, exact: None }
}

/// Outcome of a lexicographic residue scan at one depth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum LocalWitness {
    Found { witness: ResidueWitness },
    NoneFound { prime: u64, depth: u32 },
}

impl LocalWitness {
    pub fn witness(&self) -> Option<&ResidueWitness> {
        match self {
            LocalWitness::Found { witness } => Some(witness),
            LocalWitness::NoneFound { .. } => None,
        }
    }
}

/// Smallest depth at which a witness can be certified at `p`.
pub fn minimum_depth(p: u64) -> u32 {
    if p == 2 {
        3
    } else {
        1
    }
}

/// The lexicographically first Newton-certified root of `s` modulo
/// `p^depth`. The symmetry group maps certified roots to certified roots
/// and preserves the modulus, so the first one found is minimal in its orbit.
pub fn local_witness(s: &Surface, p: u64, depth: u32) -> LocalWitness {
    let scanner = ResidueScanner::new(&s.poly(), p, depth.max(1), [false; 3]);
    match scanner.first_certified(depth) {
        Some(witness) => LocalWitness::Found { witness },
        None => LocalWitness::NoneFound { prime: p, depth },
    }
}

/// Per-prime entry of a local solvability report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeEntry {
    pub prime: u64,
    pub witness: Option<ResidueWitness>,
    pub depth_scanned: u32,
    /// Set when no root survives modulo `p^d`, which proves there is no
    /// p-adic integral point at all.
    pub no_roots_modulo_power: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalSolvabilityReport {
    pub surface: Surface,
    pub real: RealWitness,
    pub primes: Vec<PrimeEntry>,
    pub prime_bound: u64,
    pub profile: Option<AssumptionOutcome>,
    pub tail_certificate: String,
    pub failing_primes: Vec<u64>,
    pub locally_solvable: bool,
}

/// Certified witness at one prime, trying depths from the minimum up to `cap`.
pub fn prime_entry(s: &Surface, p: u64, cap: u32) -> PrimeEntry {
    let g = s.poly();
    let scanner = ResidueScanner::new(&g, p, cap, [false; 3]);
    let mut scanned = 0;
    for depth in minimum_depth(p)..=cap {
        let size = (p as u128).pow(2 * depth);
        if size > LEX_SCAN_LIMIT as u128 {
            break;
        }
        scanned = depth;
        if let Some(w) = scanner.first_certified(depth) {
            return PrimeEntry { prime: p, witness: Some(w), depth_scanned: depth, no_roots_modulo_power: None };
        }
    }
    // No lexicographic witness: refine the residue tree to find any certified
    // root, or prove that every residue class dies.
    let tree = scanner.explore(cap, DEFAULT_NODE_BUDGET, |_| Some(()));
    let complete = tree.complete();
    let witness = tree.found.into_values().next();
    let dead = witness.is_none() && complete;
    PrimeEntry {
        prime: p,
        depth_scanned: scanned.max(tree.depth),
        no_roots_modulo_power: if dead { Some(tree.depth) } else { None },
        witness,
    }
}

/// Witnesses at the real place and every prime up to `bound`. Primes above
/// the bound are covered by the matching profile when it holds.
pub fn everywhere_locally_solvable(s: &Surface, bound: u64) -> LocalSolvabilityReport {
    let profile = assumption_check(ProfileId::solvability_for(s.family), s.k).ok();
    let primes: Vec<PrimeEntry> = primes_up_to(bound).into_par_iter().map(|p| prime_entry(s, p, MAX_WITNESS_DEPTH)).collect();
    let failing_primes: Vec<u64> = primes.iter().filter(|e| e.witness.is_none()).map(|e| e.prime).collect();
    let covered = profile.as_ref().is_some_and(|o| o.passed);
    let tail_certificate = if covered {
        format!("primes > {bound}: by assumption profile (Hasse-Weil)")
    } else {
        format!("primes > {bound}: not certified (per-prime-only mode)")
    };
    LocalSolvabilityReport {
        surface: *s,
        real: real_witness(s),
        locally_solvable: failing_primes.is_empty(),
        primes,
        prime_bound: bound,
        profile,
        tail_certificate,
        failing_primes,
    }
}
