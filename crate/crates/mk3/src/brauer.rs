//! Quaternion classes on the three families, their local invariants on
//! p-adic points, Brauer-Manin verdicts for integral points, failures of
//! strong approximation and adelic selections of rational points.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

use crate::arith::{factor_big, legendre_big, primes_up_to, split_valuation, squarefree_part, ArithError, DEFAULT_FACTOR_DIGITS};
use crate::hilbert::{hilbert_symbol, hilbert_symbol_padic, HalfInvariant, HilbertError, Place};
use crate::local_points::{assumption_check, AssumptionOutcome, ProfileId};
use crate::padic::{PadicApprox, PadicError, ResidueWitness};
use crate::poly::{ModPoly, Poly};
use crate::scan::{ResidueScanner, TreeScan, DEFAULT_NODE_BUDGET};
use crate::surfaces::{family_poly, integral_coords, integral_point_search, symmetry_group, AffinePoint, FamilyId, Surface};

/// Default prime bound for verdicts.
pub const DEFAULT_PRIME_BOUND: u64 = 200;
/// Default residue depth at `p = 2`.
pub const DEFAULT_DEPTH: u32 = 5;
/// Largest prime dividing a second slot that is still scanned.
const MAX_SCANNED_PRIME: u64 = 2_000;
/// Largest valuation `-v` tried for non-integral local points.
pub const MAX_NEGATIVE_VALUATION: u32 = 4;
/// Deepest residue level for non-integral local points.
pub const MAX_RATIONAL_DEPTH: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BrauerError {
    #[error("no representation of {class} is determinable at this precision; at least {extra} more digit(s) needed")]
    Undetermined { class: String, extra: u32 },
    #[error("class {class} belongs to family {class_family}, not {surface_family}")]
    FamilyMismatch { class: String, class_family: FamilyId, surface_family: FamilyId },
    #[error("point is not on the surface")]
    NotOnSurface,
    #[error(transparent)]
    Hilbert(#[from] HilbertError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// One way of writing a class as a quaternion algebra `(g, b(k))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    /// First slot, a polynomial in `x, y, z`.
    pub first: Poly,
    /// Second slot, a polynomial in `k` alone.
    pub second: Poly,
    /// Points where this representation is usable.
    pub domain: &'static str,
}

impl Representation {
    fn new(first: Poly, second: Poly, domain: &'static str) -> Self {
        Representation { first, second, domain }
    }

    /// Value of the second slot at a parameter.
    pub fn second_value(&self, k: i64) -> BigInt {
        self.second.eval_int(&[BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::from(k)])
    }

    fn permuted(&self, perm: [usize; 3]) -> Self {
        Representation { first: self.first.permute_xyz(perm), second: self.second.clone(), domain: self.domain }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// A class in the Brauer group of the affine surface with interchangeable
/// representations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternionClass {
    pub family: FamilyId,
    pub label: String,
    pub reps: Vec<Representation>,
}

fn c(n: i64) -> Poly {
    Poly::constant(n)
}

fn sq(p: Poly) -> Poly {
    &p * &p
}

impl QuaternionClass {
    fn permuted(&self, label: &str, perm: [usize; 3]) -> Self {
        QuaternionClass { family: self.family, label: label.to_string(), reps: self.reps.iter().map(|r| r.permuted(perm)).collect() }
    }

    /// `(4x^2y^2 - 1, k + 1)` on the first family, with its two cyclic rewrites.
    pub fn f1_a() -> Self {
        let b = &Poly::k() + &c(1);
        let pair = |u: Poly, v: Poly| &(&c(4) * &sq(&u * &v)) - &c(1);
        QuaternionClass {
            family: FamilyId::F1,
            label: "A".into(),
            reps: vec![
                Representation::new(pair(Poly::x(), Poly::y()), b.clone(), "4x^2y^2 != 1"),
                Representation::new(pair(Poly::y(), Poly::z()), b.clone(), "4y^2z^2 != 1"),
                Representation::new(pair(Poly::z(), Poly::x()), b, "4z^2x^2 != 1"),
            ],
        }
    }

    /// `(4x^2 - 1, k)` on the second family, also written
    /// `(-(4y^2 - 1)(4z^2 - 1), k)`.
    pub fn f2_a1() -> Self {
        let t = |v: Poly| &(&c(4) * &sq(v)) - &c(1);
        QuaternionClass {
            family: FamilyId::F2,
            label: "A1".into(),
            reps: vec![
                Representation::new(t(Poly::x()), Poly::k(), "4x^2 != 1"),
                Representation::new(-(&t(Poly::y()) * &t(Poly::z())), Poly::k(), "4y^2 != 1 and 4z^2 != 1"),
            ],
        }
    }

    pub fn f2_a2() -> Self {
        Self::f2_a1().permuted("A2", [1, 0, 2])
    }

    pub fn f2_a3() -> Self {
        Self::f2_a1().permuted("A3", [2, 1, 0])
    }

    /// `(4x^2 + 1, -2(4k + 1))` on the third family, with the rewrites
    /// `(2(4y^2+1)(4z^2+1), -2(4k+1))` and `(2(16y^2z^2-4y^2-4z^2-1), 2(4k+1))`.
    pub fn f3_a1() -> Self {
        let q = &(&c(4) * &Poly::k()) + &c(1);
        let neg = &c(-2) * &q;
        let pos = &c(2) * &q;
        let t = |v: Poly| &(&c(4) * &sq(v)) + &c(1);
        let (y2, z2) = (sq(Poly::y()), sq(Poly::z()));
        let mixed = &(&(&(&c(16) * &(&y2 * &z2)) - &(&c(4) * &y2)) - &(&c(4) * &z2)) - &c(1);
        QuaternionClass {
            family: FamilyId::F3,
            label: "A1".into(),
            reps: vec![
                Representation::new(t(Poly::x()), neg.clone(), "everywhere"),
                Representation::new(&c(2) * &(&t(Poly::y()) * &t(Poly::z())), neg, "everywhere"),
                Representation::new(&c(2) * &mixed, pos, "16y^2z^2 - 4y^2 - 4z^2 != 1"),
            ],
        }
    }

    pub fn f3_a2() -> Self {
        Self::f3_a1().permuted("A2", [1, 0, 2])
    }

    pub fn f3_a3() -> Self {
        Self::f3_a1().permuted("A3", [2, 1, 0])
    }

    /// `(4x^2 + 1, 2(4k + 1))`, listed with the positive second slot first.
    pub fn f3_a1_positive() -> Self {
        let mut cl = Self::f3_a1();
        cl.label = "A1+".into();
        let q = &(&c(4) * &Poly::k()) + &c(1);
        cl.reps[0].second = &c(2) * &q;
        cl
    }

    pub fn f3_a2_positive() -> Self {
        Self::f3_a1_positive().permuted("A2+", [1, 0, 2])
    }

    /// `(16x^2y^2 - 4x^2 - 4y^2 - 1, (4k - 5)^2 - 32)` on the third family.
    pub fn f3_b() -> Self {
        let (x2, y2) = (sq(Poly::x()), sq(Poly::y()));
        let first = &(&(&(&c(16) * &(&x2 * &y2)) - &(&c(4) * &x2)) - &(&c(4) * &y2)) - &c(1);
        let second = &sq(&(&c(4) * &Poly::k()) - &c(5)) - &c(32);
        QuaternionClass { family: FamilyId::F3, label: "B".into(), reps: vec![Representation::new(first, second, "16x^2y^2 - 4x^2 - 4y^2 != 1")] }
    }

    /// Every named class of a family.
    pub fn catalogue(f: FamilyId) -> Vec<QuaternionClass> {
        match f {
            FamilyId::F1 => vec![Self::f1_a()],
            FamilyId::F2 => vec![Self::f2_a1(), Self::f2_a2(), Self::f2_a3()],
            FamilyId::F3 => vec![Self::f3_a1(), Self::f3_a2(), Self::f3_a3(), Self::f3_a1_positive(), Self::f3_a2_positive(), Self::f3_b()],
        }
    }

    /// Look up a class by family and label.
    pub fn by_label(f: FamilyId, label: &str) -> Option<QuaternionClass> {
        Self::catalogue(f).into_iter().find(|c| c.label.eq_ignore_ascii_case(label))
    }

    /// The classes used for the obstruction statement of a profile.
    pub fn for_profile(id: ProfileId) -> Vec<QuaternionClass> {
        match id {
            ProfileId::SolvableF1 | ProfileId::ObstructF1 => vec![Self::f1_a()],
            ProfileId::SolvableF2 | ProfileId::ObstructF2 => vec![Self::f2_a1(), Self::f2_a2()],
            ProfileId::SolvableF3 | ProfileId::ObstructF3 => vec![Self::f3_a1(), Self::f3_a2()],
            ProfileId::ProductF3Odd | ProfileId::ProductF3Even => vec![Self::f3_a1_positive(), Self::f3_a2_positive()],
        }
    }

    /// The default classes of a family.
    pub fn default_for(f: FamilyId) -> Vec<QuaternionClass> {
        Self::for_profile(ProfileId::obstruction_for(f))
    }
}

/// Summary of a class for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassSummary {
    pub label: String,
    pub representations: Vec<String>,
}

impl From<&QuaternionClass> for ClassSummary {
    fn from(c: &QuaternionClass) -> Self {
        ClassSummary { label: c.label.clone(), representations: c.reps.iter().map(|r| r.to_string()).collect() }
    }
}

fn check_family(classes: &[QuaternionClass], s: &Surface) -> Result<(), BrauerError> {
    for cl in classes {
        if cl.family != s.family {
            return Err(BrauerError::FamilyMismatch { class: cl.label.clone(), class_family: cl.family, surface_family: s.family });
        }
    }
    Ok(())
}

/// Joint invariant vector of a list of classes at one point.
pub type InvariantVector = Vec<HalfInvariant>;

/// Render an invariant vector as `(1/2, 0)`.
pub fn format_vector(v: &[HalfInvariant]) -> String {
    let parts: Vec<String> = v.iter().map(|h| h.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Exact local invariant of a class at a rational point.
pub fn local_invariant_exact(cl: &QuaternionClass, s: &Surface, pt: &AffinePoint, v: Place) -> Result<HalfInvariant, BrauerError> {
    if !s.evaluate(pt).is_zero() {
        return Err(BrauerError::NotOnSurface);
    }
    let args = [pt.x.clone(), pt.y.clone(), pt.z.clone(), BigRational::from_integer(BigInt::from(s.k))];
    for r in &cl.reps {
        let a = r.first.eval_rat(&args);
        let b = BigRational::from_integer(r.second_value(s.k));
        if a.is_zero() || b.is_zero() {
            continue;
        }
        return Ok(hilbert_symbol(&a, &b, v)?);
    }
    Err(BrauerError::Undetermined { class: cl.label.clone(), extra: 0 })
}

struct CompiledRep {
    levels: Vec<ModPoly>,
    shift: i64,
    b: BigRational,
}

struct CompiledClass {
    label: String,
    reps: Vec<CompiledRep>,
}

/// Classes compiled for evaluation at residue witnesses of one prime, for
/// points `(u / p^a, v / p^b, w / p^c)` with fixed valuation shifts.
pub struct ClassEvaluator {
    p: u64,
    classes: Vec<CompiledClass>,
}

impl ClassEvaluator {
    pub fn new(classes: &[QuaternionClass], k: i64, p: u64, max_level: u32, shifts: [u32; 3]) -> Self {
        let compiled = classes
            .iter()
            .map(|cl| CompiledClass {
                label: cl.label.clone(),
                reps: cl
                    .reps
                    .iter()
                    .filter_map(|r| {
                        let b = r.second_value(k);
                        if b.is_zero() {
                            return None;
                        }
                        let b = squarefree_part(&b, 40).unwrap_or(b);
                        let (g, shift) = r.first.specialize_k(k).scale_valuations(p, shifts);
                        let levels = (0..=max_level).map(|j| g.compile_mod(p.pow(j).max(1))).collect();
                        Some(CompiledRep { levels, shift: shift as i64, b: BigRational::from_integer(b) })
                    })
                    .collect(),
            })
            .collect();
        ClassEvaluator { p, classes: compiled }
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    fn rep_value(&self, r: &CompiledRep, w: &ResidueWitness) -> Result<HalfInvariant, BrauerError> {
        let prec = w.reliable_digits();
        let m = self.p.pow(prec);
        let res = r.levels[w.exponent as usize].eval(w.point) % m;
        let a = PadicApprox::from_residue(res, self.p, prec).map_err(|e| BrauerError::Hilbert(HilbertError::Precision(e)))?;
        Ok(hilbert_symbol_padic(&a.shift(-r.shift), &r.b, self.p)?)
    }

    /// Invariants of every representation of class `i` at a certified witness.
    pub fn rep_values(&self, i: usize, w: &ResidueWitness) -> Vec<Option<HalfInvariant>> {
        self.classes[i].reps.iter().map(|r| self.rep_value(r, w).ok()).collect()
    }

    /// Invariant of class `i` from its first determinable representation.
    pub fn class_value(&self, i: usize, w: &ResidueWitness) -> Result<HalfInvariant, BrauerError> {
        let mut extra = 1;
        for r in &self.classes[i].reps {
            match self.rep_value(r, w) {
                Ok(v) => return Ok(v),
                Err(BrauerError::Hilbert(HilbertError::Precision(PadicError::PrecisionExhausted { needed, available }))) => {
                    extra = extra.max(needed.saturating_sub(available));
                }
                Err(_) => {}
            }
        }
        Err(BrauerError::Undetermined { class: self.classes[i].label.clone(), extra })
    }

    /// Joint vector, or `None` if some class is not yet determined.
    pub fn vector(&self, w: &ResidueWitness) -> Option<InvariantVector> {
        (0..self.classes.len()).map(|i| self.class_value(i, w).ok()).collect()
    }
}

/// Invariant of one class at a certified residue witness of an integral point.
pub fn local_invariant(cl: &QuaternionClass, s: &Surface, w: &ResidueWitness) -> Result<HalfInvariant, BrauerError> {
    check_family(std::slice::from_ref(cl), s)?;
    let ev = ClassEvaluator::new(std::slice::from_ref(cl), s.k, w.prime, w.exponent, [0; 3]);
    ev.class_value(0, w)
}

/// How the invariants at a place were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceMethod {
    /// Sign analysis over the reals.
    RealSign,
    /// Exhaustive refinement of residue classes.
    ResidueScan,
    /// Square-class certificate on the second slot or on the first slot at every root modulo `p`.
    Certificate,
}

/// Attained joint invariant vectors at one place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlaceInvariants {
    pub place: Place,
    pub method: PlaceMethod,
    pub vectors: Vec<InvariantVector>,
    /// No undecided residue class remains.
    pub complete: bool,
    /// The set is unchanged one level deeper.
    pub stable: bool,
    pub depth: Option<u32>,
    pub witnesses: Vec<ResidueWitness>,
    pub note: Option<String>,
}

impl PlaceInvariants {
    pub fn is_constant(&self) -> bool {
        self.vectors.len() == 1 && self.complete
    }

    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.vectors[0].iter().all(|h| h.is_zero())
    }
}

fn tree_to_place(tree: &TreeScan<InvariantVector>, p: u64, depth: u32) -> PlaceInvariants {
    let vectors = tree.values_at(depth);
    let stable = vectors.len() == tree.found.len();
    let witnesses = vectors.iter().map(|v| tree.found[v].clone()).collect();
    PlaceInvariants {
        place: Place::Prime(p),
        method: PlaceMethod::ResidueScan,
        vectors,
        complete: tree.complete_at(depth),
        stable,
        depth: Some(depth),
        witnesses,
        note: None,
    }
}

/// Residue depth used at `p` for a requested depth at `p = 2`.
pub fn depth_at(p: u64, depth: u32) -> u32 {
    if p == 2 {
        depth.max(3)
    } else {
        depth.saturating_sub(2).max(1)
    }
}

/// Attained invariant vectors over the integral points at `p`, scanning
/// residue classes to `depth` and one level deeper for stability.
pub fn invariant_set(classes: &[QuaternionClass], s: &Surface, p: u64, depth: u32) -> Result<PlaceInvariants, BrauerError> {
    check_family(classes, s)?;
    Ok(scan_place(classes, s, p, depth, [0; 3], &s.poly()))
}

fn scan_place(classes: &[QuaternionClass], s: &Surface, p: u64, depth: u32, shifts: [u32; 3], g: &Poly) -> PlaceInvariants {
    let units = [shifts[0] > 0, shifts[1] > 0, shifts[2] > 0];
    let scanner = ResidueScanner::new(g, p, depth + 1, units);
    let ev = ClassEvaluator::new(classes, s.k, p, depth + 1, shifts);
    let tree = scanner.explore(depth + 1, DEFAULT_NODE_BUDGET, |w| ev.vector(w));
    tree_to_place(&tree, p, depth)
}

/// Whether `b` is a square in `Q_p` for odd `p`.
fn is_padic_square_odd(b: &BigInt, p: u64) -> bool {
    let (v, u) = split_valuation(b, p);
    v % 2 == 0 && legendre_big(&u, p) == 1
}

fn rep_certifies_zero(r: &Representation, k: i64, p: u64, root: [u64; 3]) -> bool {
    let b = r.second_value(k);
    if b.is_zero() {
        return false;
    }
    if is_padic_square_odd(&b, p) {
        return true;
    }
    let (v, _) = split_valuation(&b, p);
    if v % 2 == 1 {
        return false;
    }
    // Unit second slot (up to squares) that is not a square: the symbol is
    // the parity of v(g), which is zero when g is a unit at the root.
    r.first.specialize_k(k).compile_mod(p).eval(root) != 0
}

/// Invariants at an odd prime that is not critical: certify zero at every
/// root modulo `p` when possible, else fall back to a residue scan.
fn tail_place(classes: &[QuaternionClass], s: &Surface, p: u64, depth: u32) -> PlaceInvariants {
    let scanner = ResidueScanner::new(&s.poly(), p, 1, [false; 3]);
    let roots = scanner.level_one_roots();
    let certified = !roots.is_empty()
        && roots.par_iter().all(|&root| classes.iter().all(|cl| cl.reps.iter().any(|r| rep_certifies_zero(r, s.k, p, root))));
    if certified {
        return PlaceInvariants {
            place: Place::Prime(p),
            method: PlaceMethod::Certificate,
            vectors: vec![vec![HalfInvariant::ZERO; classes.len()]],
            complete: true,
            stable: true,
            depth: Some(1),
            witnesses: vec![],
            note: None,
        };
    }
    scan_place(classes, s, p, depth, [0; 3], &s.poly())
}

/// Whether a polynomial is visibly positive on `R^3`: even exponents,
/// positive coefficients and a positive constant term.
fn positive_definite(g: &Poly) -> bool {
    let mut has_const = false;
    for (m, c) in g.terms() {
        if m[..3].iter().any(|e| e % 2 == 1) || !c.is_positive() {
            return false;
        }
        if m[..3].iter().all(|&e| e == 0) {
            has_const = true;
        }
    }
    has_const
}

/// Whether `g > 0` at every real point of the surface: either `g` is
/// positive definite, or `F = -g * c^2 + C` for a coordinate `c` and a
/// positive definite `C`, so that `g c^2 = C > 0`.
fn positive_on_surface(g: &Poly, s: &Surface) -> bool {
    if positive_definite(g) {
        return true;
    }
    let f = s.poly();
    (0..3).any(|i| {
        let co = f.coefficients_in(i);
        co.len() == 3 && co[1].is_zero() && &(-&co[2]) == g && positive_definite(&co[0])
    })
}

/// Sample real points exactly: for rational `x, y` on a grid, `z^2` is the
/// rational `-C / A`; first slots are even in `z`, so their signs are exact.
fn real_samples(s: &Surface) -> Vec<(BigRational, BigRational, BigRational)> {
    let f = s.poly();
    let co = f.coefficients_in(2);
    let mut out = Vec::new();
    let grid: Vec<BigRational> = (-16..=16).map(|n| BigRational::new(BigInt::from(n), BigInt::from(4))).collect();
    for x in &grid {
        for y in &grid {
            let args = [x.clone(), y.clone(), BigRational::zero(), BigRational::zero()];
            let a = co.get(2).map(|p| p.eval_rat(&args)).unwrap_or_else(BigRational::zero);
            let cc = co[0].eval_rat(&args);
            if a.is_zero() {
                continue;
            }
            let z2 = -cc / a;
            if !z2.is_negative() {
                out.push((x.clone(), y.clone(), z2));
            }
        }
    }
    out
}

fn eval_even_in_z(g: &Poly, x: &BigRational, y: &BigRational, z2: &BigRational) -> BigRational {
    let co = g.coefficients_in(2);
    let args = [x.clone(), y.clone(), BigRational::zero(), BigRational::zero()];
    let mut acc = BigRational::zero();
    let mut pw = BigRational::one();
    for (i, cpoly) in co.iter().enumerate() {
        if i % 2 == 0 {
            acc += cpoly.eval_rat(&args) * &pw;
            pw *= z2;
        }
    }
    acc
}

/// Attained invariant vectors at the real place.
pub fn real_invariants(classes: &[QuaternionClass], s: &Surface) -> PlaceInvariants {
    let mut fixed: Vec<Option<HalfInvariant>> = Vec::new();
    let mut notes = Vec::new();
    for cl in classes {
        let mut v = None;
        for r in &cl.reps {
            let b = r.second_value(s.k);
            if b.is_positive() {
                v = Some(HalfInvariant::ZERO);
                notes.push(format!("{}: second slot {} > 0", cl.label, b));
                break;
            }
            let g = r.first.specialize_k(s.k);
            if !b.is_zero() && positive_on_surface(&g, s) {
                v = Some(HalfInvariant::ZERO);
                notes.push(format!("{}: {} > 0 on the real surface", cl.label, r.first));
                break;
            }
        }
        fixed.push(v);
    }
    let mut vectors = BTreeSet::new();
    let complete = if fixed.iter().all(|v| v.is_some()) {
        vectors.insert(fixed.iter().map(|v| v.unwrap()).collect::<Vec<_>>());
        true
    } else {
        for (x, y, z2) in real_samples(s) {
            let vec: Option<InvariantVector> = classes
                .iter()
                .zip(&fixed)
                .map(|(cl, f)| {
                    if let Some(v) = f {
                        return Some(*v);
                    }
                    cl.reps.iter().find_map(|r| {
                        let a = eval_even_in_z(&r.first.specialize_k(s.k), &x, &y, &z2);
                        let b = BigRational::from_integer(r.second_value(s.k));
                        if a.is_zero() || b.is_zero() {
                            None
                        } else {
                            hilbert_symbol(&a, &b, Place::Real).ok()
                        }
                    })
                })
                .collect();
            if let Some(v) = vec {
                vectors.insert(v);
            }
        }
        let free = fixed.iter().filter(|v| v.is_none()).count();
        notes.push("sampled real points on a rational grid".into());
        vectors.len() == 1 << free
    };
    PlaceInvariants {
        place: Place::Real,
        method: PlaceMethod::RealSign,
        vectors: vectors.into_iter().collect(),
        complete,
        stable: complete,
        depth: None,
        witnesses: vec![],
        note: Some(notes.join("; ")),
    }
}

/// Verdict on integral points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Obstructed,
    NotObstructedWithWitness,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Obstructed => "obstructed",
            Verdict::NotObstructedWithWitness => "not_obstructed_with_witness",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ObstructionReport {
    pub surface: Surface,
    pub profile: Option<AssumptionOutcome>,
    pub classes: Vec<ClassSummary>,
    pub prime_bound: u64,
    pub depth: u32,
    /// The real place, 2, 3 and scanned primes dividing the second slots.
    pub critical_places: Vec<PlaceInvariants>,
    /// Other primes up to the bound whose invariants were certified zero.
    pub certified_primes: Vec<u64>,
    /// Other primes up to the bound that needed a residue scan.
    pub scanned_tail: Vec<PlaceInvariants>,
    pub tail_notes: Vec<String>,
    /// Attainable totals `sum_v inv_v` over all selections.
    pub attainable_sums: Vec<InvariantVector>,
    pub verdict: Verdict,
}

impl ObstructionReport {
    /// Invariants recorded at a place.
    pub fn place(&self, v: Place) -> Option<&PlaceInvariants> {
        self.critical_places.iter().chain(&self.scanned_tail).find(|pi| pi.place == v)
    }

    /// Whether every scanned place other than `special` has only the zero vector.
    pub fn zero_away_from(&self, special: &[Place]) -> bool {
        self.critical_places.iter().chain(&self.scanned_tail).filter(|pi| !special.contains(&pi.place)).all(|pi| pi.is_zero())
    }
}

fn add_vectors(a: &[HalfInvariant], b: &[HalfInvariant]) -> InvariantVector {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

/// All sums `v_1 + ... + v_n` with `v_i` drawn from the i-th set.
pub fn minkowski_sum<'a, I: IntoIterator<Item = &'a [InvariantVector]>>(sets: I, n: usize) -> BTreeSet<InvariantVector> {
    let mut acc: BTreeSet<InvariantVector> = BTreeSet::from([vec![HalfInvariant::ZERO; n]]);
    for set in sets {
        let mut next = BTreeSet::new();
        for a in &acc {
            for b in set {
                next.insert(add_vectors(a, b));
            }
        }
        acc = next;
    }
    acc
}

/// Primes dividing the squarefree part of some second slot, and the
/// nonzero second slots of each class.
fn second_slot_primes(classes: &[QuaternionClass], k: i64) -> Result<(BTreeSet<u64>, Vec<Vec<BigInt>>), BrauerError> {
    let mut crit = BTreeSet::new();
    let mut slots = Vec::new();
    for cl in classes {
        let mut mine = Vec::new();
        for r in &cl.reps {
            let b = r.second_value(k);
            if b.is_zero() {
                continue;
            }
            let sf = squarefree_part(&b, DEFAULT_FACTOR_DIGITS * 2)?;
            for (q, _) in factor_big(&sf, DEFAULT_FACTOR_DIGITS * 2)? {
                crit.insert(q.to_u64().unwrap_or(u64::MAX));
            }
            mine.push(b);
        }
        slots.push(mine);
    }
    Ok((crit, slots))
}

/// Brauer-Manin verdict for the integral points of `s` with respect to the
/// group generated by `classes`.
pub fn obstruction_verdict(s: &Surface, classes: &[QuaternionClass], bound: u64, depth: u32) -> Result<ObstructionReport, BrauerError> {
    obstruction_verdict_with_profile(s, classes, bound, depth, None)
}

pub fn obstruction_verdict_with_profile(
    s: &Surface,
    classes: &[QuaternionClass],
    bound: u64,
    depth: u32,
    profile: Option<AssumptionOutcome>,
) -> Result<ObstructionReport, BrauerError> {
    check_family(classes, s)?;
    let n = classes.len();
    let (slot_primes, slots) = second_slot_primes(classes, s.k)?;
    let mut tail_notes = Vec::new();
    let mut critical: BTreeSet<u64> = [2u64, 3].into_iter().collect();
    for &q in &slot_primes {
        if q <= bound.max(MAX_SCANNED_PRIME) {
            critical.insert(q);
        } else {
            tail_notes.push(format!("prime {q} divides a second slot and exceeds the scan limit; not certified"));
        }
    }
    let uncovered_slot_prime = slot_primes.iter().any(|&q| q > bound.max(MAX_SCANNED_PRIME));

    let mut critical_places = vec![real_invariants(classes, s)];
    let scanned: Vec<PlaceInvariants> = critical.par_iter().map(|&p| scan_place(classes, s, p, depth_at(p, depth), [0; 3], &s.poly())).collect();
    critical_places.extend(scanned);

    let tail_primes: Vec<u64> = primes_up_to(bound).into_iter().filter(|p| !critical.contains(p)).collect();
    let tails: Vec<PlaceInvariants> = tail_primes.par_iter().map(|&p| tail_place(classes, s, p, depth_at(p, depth))).collect();
    let mut certified_primes = Vec::new();
    let mut scanned_tail = Vec::new();
    for t in tails {
        match (t.method, t.place) {
            (PlaceMethod::Certificate, Place::Prime(p)) => certified_primes.push(p),
            _ => scanned_tail.push(t),
        }
    }

    // Primes beyond the bound: those dividing a second slot must see its
    // squarefree part as a square; the rest have unit second slots, and the
    // factorization identities force the symbol to vanish.
    let mut big_ok = true;
    for (cl, bs) in classes.iter().zip(&slots) {
        let mut big: BTreeSet<u64> = BTreeSet::new();
        for b in bs {
            match factor_big(b, DEFAULT_FACTOR_DIGITS * 2) {
                Ok(fs) => big.extend(fs.into_iter().map(|(q, _)| q.to_u64().unwrap_or(u64::MAX)).filter(|&q| q > bound && !critical.contains(&q))),
                Err(_) => {
                    big_ok = false;
                    tail_notes.push(format!("{}: second slot {b} too large to factor", cl.label));
                }
            }
        }
        for q in big {
            // One representation whose second slot is a q-adic square makes
            // the class vanish on every q-adic point.
            match bs.iter().find(|b| is_padic_square_odd(b, q)) {
                Some(b) => tail_notes.push(format!("{}: prime {q} > {bound} divides a second slot; {b} is a square in Q_{q}", cl.label)),
                None => {
                    big_ok = false;
                    tail_notes.push(format!("{}: prime {q} > {bound} divides the second slots and none is a square in Q_{q}", cl.label));
                }
            }
        }
    }
    tail_notes.push(format!("primes > {bound} with unit second slots: invariant 0 by the factorization identities (case analysis)"));
    tail_notes.dedup();

    let all_places: Vec<&PlaceInvariants> = critical_places.iter().chain(&scanned_tail).collect();
    let sums = minkowski_sum(all_places.iter().map(|p| p.vectors.as_slice()), n);
    let zero = vec![HalfInvariant::ZERO; n];
    let exact = all_places.iter().all(|p| p.complete && p.stable) && big_ok && !uncovered_slot_prime;
    let any_empty = all_places.iter().any(|p| p.vectors.is_empty());
    let verdict = if sums.contains(&zero) && !any_empty {
        Verdict::NotObstructedWithWitness
    } else if exact && !any_empty {
        Verdict::Obstructed
    } else {
        Verdict::Inconclusive
    };
    if any_empty {
        tail_notes.push("some place has no certified local point at this depth".into());
    }
    Ok(ObstructionReport {
        surface: *s,
        profile,
        classes: classes.iter().map(ClassSummary::from).collect(),
        prime_bound: bound,
        depth,
        critical_places,
        certified_primes,
        scanned_tail,
        tail_notes,
        attainable_sums: sums.into_iter().collect(),
        verdict,
    })
}

/// Verdict for a profile parameter, using the profile's classes.
pub fn obstruction_for_profile(id: ProfileId, ell: i64, bound: u64, depth: u32) -> Result<ObstructionReport, BrauerError> {
    let outcome = assumption_check(id, ell).map_err(|e| match e {
        crate::local_points::ProfileError::Arith(a) => BrauerError::Arith(a),
        other => BrauerError::Undetermined { class: other.to_string(), extra: 0 },
    })?;
    let k = outcome.k.ok_or(BrauerError::Undetermined { class: "k is not an integer".into(), extra: 0 })?;
    let s = Surface::new(id.family(), k);
    obstruction_verdict_with_profile(&s, &QuaternionClass::for_profile(id), bound, depth, Some(outcome))
}

/// A 2-adic point with its invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantWitness {
    pub invariant: HalfInvariant,
    pub witness: ResidueWitness,
}

/// An integral point and its images under the symmetry group, viewed as
/// 2-adic points, with the exact invariants they carry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PermutedIntegral {
    pub point: AffinePoint,
    pub images: Vec<(AffinePoint, HalfInvariant)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrongApproximationReport {
    pub surface: Surface,
    pub class: ClassSummary,
    pub invariants_at_2: Vec<HalfInvariant>,
    /// Two 2-adic witnesses with distinct invariants, when they exist.
    pub witnesses: Vec<InvariantWitness>,
    pub integral: Option<PermutedIntegral>,
    pub failure_exhibited: bool,
    pub note: String,
}

/// Exhibit two 2-adic integral points with distinct invariants of a class.
/// Changing the 2-component of an adelic integral point then changes the
/// total invariant, so integral points are not dense in the adelic ones.
pub fn strong_approximation_failure(s: &Surface, cl: &QuaternionClass, depth: u32, search_box: u64) -> Result<StrongApproximationReport, BrauerError> {
    let set = invariant_set(std::slice::from_ref(cl), s, 2, depth)?;
    let mut witnesses = Vec::new();
    for (v, w) in set.vectors.iter().zip(&set.witnesses) {
        witnesses.push(InvariantWitness { invariant: v[0], witness: w.clone() });
    }
    let invariants_at_2: Vec<HalfInvariant> = set.vectors.iter().map(|v| v[0]).collect();
    let integral = integral_point_search(s, search_box).orbits.first().map(|o| {
        let base = AffinePoint::from_ints(o.point[0], o.point[1], o.point[2]);
        let mut images = BTreeMap::new();
        for g in symmetry_group() {
            let q = base.apply(&g);
            if let Ok(v) = local_invariant_exact(cl, s, &q, Place::Prime(2)) {
                images.insert(q, v);
            }
        }
        PermutedIntegral { point: base, images: images.into_iter().collect() }
    });
    let failure_exhibited = invariants_at_2.len() == 2;
    let note = if failure_exhibited {
        "two 2-adic integral points carry invariants 0 and 1/2".to_string()
    } else {
        format!("no failure exhibited by this class at p=2: the invariant is constant at depth {}", set.depth.unwrap_or(depth))
    };
    Ok(StrongApproximationReport { surface: *s, class: ClassSummary::from(cl), invariants_at_2, witnesses, integral, failure_exhibited, note })
}

/// A non-integral local point found at one prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalLocalPoint {
    pub prime: u64,
    /// Valuations of `x, y, z` (nonpositive).
    pub valuations: [i64; 3],
    /// Residues of the scaled coordinates `p^a x, p^b y, p^c z`.
    pub witness: ResidueWitness,
    pub vector: InvariantVector,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RationalBmReport {
    pub surface: Surface,
    pub classes: Vec<ClassSummary>,
    pub prime: u64,
    /// Integral invariant vectors at every other scanned place.
    pub other_places: Vec<PlaceInvariants>,
    /// Non-integral local points at `prime` whose vector completes a zero sum.
    pub points: Vec<RationalLocalPoint>,
    /// A full selection: the chosen vector at each place, summing to zero.
    pub selection: Vec<(Place, InvariantVector)>,
    pub found: bool,
    pub bounds: String,
}

impl RationalBmReport {
    /// Whether a point with exactly these valuations (up to permuting
    /// coordinates) was found.
    pub fn has_pattern(&self, vals: [i64; 3]) -> bool {
        let mut want = vals;
        want.sort();
        self.points.iter().any(|p| {
            let mut v = p.valuations;
            v.sort();
            v == want
        })
    }
}

/// Scaled equation for points with `v(x) = -a, v(y) = -b, v(z) = -c`.
pub fn scaled_equation(s: &Surface, p: u64, shifts: [u32; 3]) -> Poly {
    let (g, _) = family_poly(s.family).specialize_k(s.k).scale_valuations(p, shifts);
    let content = g.content();
    g.div_exact(&content)
}

/// Search `Q_p`-points with negative valuations at `p` whose invariant
/// vector, together with integral points elsewhere, sums to zero.
pub fn rational_bm_witness(s: &Surface, classes: &[QuaternionClass], p: u64, bound: u64, depth: u32) -> Result<RationalBmReport, BrauerError> {
    check_family(classes, s)?;
    let n = classes.len();
    let integral = obstruction_verdict(s, classes, bound, depth)?;
    let others: Vec<PlaceInvariants> = integral.critical_places.iter().chain(&integral.scanned_tail).filter(|pi| pi.place != Place::Prime(p)).cloned().collect();
    let sums_elsewhere = minkowski_sum(others.iter().map(|pi| pi.vectors.as_slice()), n);

    let mut patterns = Vec::new();
    for a in 0..=MAX_NEGATIVE_VALUATION {
        for b in 0..=MAX_NEGATIVE_VALUATION {
            for c in 0..=MAX_NEGATIVE_VALUATION {
                if a + b + c > 0 {
                    patterns.push([a, b, c]);
                }
            }
        }
    }
    let found: Vec<Vec<RationalLocalPoint>> = patterns
        .par_iter()
        .map(|&sh| {
            let g = scaled_equation(s, p, sh);
            let pi = scan_place(classes, s, p, MAX_RATIONAL_DEPTH - 1, sh, &g);
            pi.vectors
                .iter()
                .zip(&pi.witnesses)
                .filter(|(v, _)| sums_elsewhere.contains(*v))
                .map(|(v, w)| RationalLocalPoint {
                    prime: p,
                    valuations: [-(sh[0] as i64), -(sh[1] as i64), -(sh[2] as i64)],
                    witness: w.clone(),
                    vector: v.clone(),
                })
                .collect()
        })
        .collect();
    let points: Vec<RationalLocalPoint> = found.into_iter().flatten().collect();

    let mut selection = Vec::new();
    if let Some(first) = points.first() {
        // Choose vectors elsewhere greedily: walk the places, keeping a
        // residual target that the remaining places can still reach.
        let mut target = first.vector.clone();
        selection.push((Place::Prime(p), first.vector.clone()));
        for (i, pi) in others.iter().enumerate() {
            let rest = minkowski_sum(others[i + 1..].iter().map(|q| q.vectors.as_slice()), n);
            let pick = pi.vectors.iter().find(|v| rest.contains(&add_vectors(&target, v))).expect("target reachable by construction");
            target = add_vectors(&target, pick);
            selection.push((pi.place, pick.clone()));
        }
    }
    Ok(RationalBmReport {
        surface: *s,
        classes: classes.iter().map(ClassSummary::from).collect(),
        prime: p,
        other_places: others,
        found: !points.is_empty(),
        points,
        selection,
        bounds: format!("valuations >= -{MAX_NEGATIVE_VALUATION}, residue depth <= {MAX_RATIONAL_DEPTH}, primes <= {bound}"),
    })
}

/// Whether every coordinate of an integral point is a unit at `p`.
pub fn integral_point_units(pt: &AffinePoint, p: u64) -> Option<[bool; 3]> {
    let c = integral_coords(pt)?;
    Some(c.map(|v| v % p as i64 != 0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_reps_share_the_family() {
        for f in FamilyId::ALL {
            for cl in QuaternionClass::catalogue(f) {
                assert_eq!(cl.family, f);
                assert!(!cl.reps.is_empty());
                for r in &cl.reps {
                    assert!(r.second.is_k_only());
                    assert!(r.first.is_even());
                }
            }
        }
    }

    #[test]
    fn exact_invariant_at_an_integral_point() {
        let s = Surface::new(FamilyId::F2, 574);
        let cl = QuaternionClass::f2_a1();
        // (3, 574)_2 = (3, 2)_2 + (3, 287)_2 = 1/2 + 1/2 and (255, 574)_2 = (-1, 287)_2 = 1/2.
        let p = AffinePoint::from_ints(1, 1, 8);
        assert_eq!(local_invariant_exact(&cl, &s, &p, Place::Prime(2)).unwrap(), HalfInvariant::ZERO);
        let q = AffinePoint::from_ints(8, 1, 1);
        assert_eq!(local_invariant_exact(&cl, &s, &q, Place::Prime(2)).unwrap(), HalfInvariant::HALF);
    }

    #[test]
    fn minkowski_sum_of_singletons() {
        let h = HalfInvariant::HALF;
        let z = HalfInvariant::ZERO;
        let a = vec![vec![h, z]];
        let b = vec![vec![h, h], vec![z, z]];
        let s = minkowski_sum([a.as_slice(), b.as_slice()], 2);
        assert_eq!(s, BTreeSet::from([vec![z, h], vec![h, z]]));
    }

    #[test]
    fn positivity_certificates() {
        let s = Surface::new(FamilyId::F1, -17);
        assert!(positive_on_surface(&QuaternionClass::f1_a().reps[0].first, &s));
        assert!(positive_definite(&QuaternionClass::f3_a1().reps[0].first));
        assert!(!positive_on_surface(&QuaternionClass::f1_a().reps[0].first, &Surface::new(FamilyId::F1, 5)));
    }
}
