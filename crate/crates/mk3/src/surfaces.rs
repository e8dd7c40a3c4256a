//! The three symmetric (2,2,2) families, their affine equations, identities
//! and integral and rational point searches.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

use crate::arith::exact_sqrt_i128;
use crate::poly::{Poly, PolyTriple};

/// Errors raised by the surfaces module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unknown family {0:?}; expected f1, f2 or f3")]
    UnknownFamily(String),
    #[error("identity {identity} does not apply to family {family}")]
    NotApplicable { identity: IdentityId, family: FamilyId },
    #[error("point {point} is not on the surface (value {value})")]
    NotOnSurface { point: String, value: String },
}

/// One of the three families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    F1,
    F2,
    F3,
}

impl FamilyId {
    pub const ALL: [FamilyId; 3] = [FamilyId::F1, FamilyId::F2, FamilyId::F3];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::F1 => "f1",
            FamilyId::F2 => "f2",
            FamilyId::F3 => "f3",
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyId {
    type Err = SurfaceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "f1" | "1" => Ok(FamilyId::F1),
            "f2" | "2" => Ok(FamilyId::F2),
            "f3" | "3" => Ok(FamilyId::F3),
            _ => Err(SurfaceError::UnknownFamily(s.to_string())),
        }
    }
}

impl Serialize for FamilyId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

fn sq(i: usize) -> Poly {
    Poly::var(i).pow(2)
}

/// `x^2 + y^2 + z^2`.
fn sum_squares() -> Poly {
    &(&sq(0) + &sq(1)) + &sq(2)
}

/// `x^2 y^2 + y^2 z^2 + z^2 x^2`.
fn sum_pairs() -> Poly {
    &(&(&sq(0) * &sq(1)) + &(&sq(1) * &sq(2))) + &(&sq(2) * &sq(0))
}

/// `x^2 y^2 z^2`.
fn triple() -> Poly {
    &(&sq(0) * &sq(1)) * &sq(2)
}

/// The family polynomial in `x, y, z, k`.
pub fn family_poly(f: FamilyId) -> Poly {
    let base = match f {
        FamilyId::F1 => &sum_squares() - &triple().scale(4),
        FamilyId::F2 => &(&sum_squares() - &sum_pairs().scale(4)) + &triple().scale(16),
        FamilyId::F3 => &(&sum_squares() + &sum_pairs().scale(4)) - &triple().scale(16),
    };
    &base - &Poly::k()
}

/// The part of the family polynomial without `k`, so that `F = Q - k`.
pub fn family_q(f: FamilyId) -> Poly {
    &family_poly(f) + &Poly::k()
}

/// A surface `F(x, y, z) = 0` from one family with a fixed parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Surface {
    pub family: FamilyId,
    pub k: i64,
}

/// An affine point with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffinePoint {
    pub x: BigRational,
    pub y: BigRational,
    pub z: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl AffinePoint {
    pub fn new(x: BigRational, y: BigRational, z: BigRational) -> Self {
        AffinePoint { x, y, z }
    }

    pub fn from_ints(x: i64, y: i64, z: i64) -> Self {
        AffinePoint { x: rat(x), y: rat(y), z: rat(z) }
    }

    /// Build from `(numerator, denominator)` pairs.
    pub fn from_fracs(c: [(i64, i64); 3]) -> Self {
        let f = |(n, d): (i64, i64)| BigRational::new(BigInt::from(n), BigInt::from(d));
        AffinePoint { x: f(c[0]), y: f(c[1]), z: f(c[2]) }
    }

    pub fn coords(&self) -> [BigRational; 3] {
        [self.x.clone(), self.y.clone(), self.z.clone()]
    }

    pub fn from_coords(c: [BigRational; 3]) -> Self {
        let [x, y, z] = c;
        AffinePoint { x, y, z }
    }

    /// Whether every coordinate is an integer.
    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer() && self.z.is_integer()
    }

    /// Apply a symmetry: coordinate `i` of the result is `sign[i] * self[perm[i]]`.
    pub fn apply(&self, g: &Symmetry) -> AffinePoint {
        let c = self.coords();
        let pick = |i: usize| if g.signs[i] < 0 { -c[g.perm[i]].clone() } else { c[g.perm[i]].clone() };
        AffinePoint { x: pick(0), y: pick(1), z: pick(2) }
    }

    /// Canonical form under all sign changes and permutations: absolute
    /// values sorted ascending.
    pub fn canonical_unsigned(&self) -> AffinePoint {
        let mut c = [self.x.abs(), self.y.abs(), self.z.abs()];
        c.sort();
        AffinePoint::from_coords(c)
    }
}

impl fmt::Display for AffinePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

impl Serialize for AffinePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AffinePoint", 3)?;
        st.serialize_field("x", &self.x.to_string())?;
        st.serialize_field("y", &self.y.to_string())?;
        st.serialize_field("z", &self.z.to_string())?;
        st.end()
    }
}

/// An element of the order-24 group generated by permutations and double
/// sign changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub perm: [usize; 3],
    pub signs: [i8; 3],
}

/// All 24 elements of the symmetry group.
pub fn symmetry_group() -> Vec<Symmetry> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    const SIGNS: [[i8; 3]; 4] = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]];
    let mut out = Vec::with_capacity(24);
    for perm in PERMS {
        for signs in SIGNS {
            out.push(Symmetry { perm, signs });
        }
    }
    out
}

/// Orbit of an integer triple under the symmetry group, sorted and deduplicated.
pub fn orbit_int(p: [i64; 3]) -> Vec<[i64; 3]> {
    let set: BTreeSet<[i64; 3]> = symmetry_group()
        .iter()
        .map(|g| {
            let mut q = [0i64; 3];
            for i in 0..3 {
                q[i] = g.signs[i] as i64 * p[g.perm[i]];
            }
            q
        })
        .collect();
    set.into_iter().collect()
}

/// Coefficients of `F = A(x, y) z^2 + C(x, y)` for a family.
pub fn z_coefficients(f: FamilyId) -> (Poly, Poly) {
    let c = family_poly(f).coefficients_in(2);
    debug_assert_eq!(c.len(), 3);
    debug_assert!(c[1].is_zero());
    (c[2].clone(), c[0].clone())
}

/// General symmetric form `a x^2y^2z^2 + b(x^2y^2 + x^2z^2 + y^2z^2) + c xyz + d(x^2 + y^2 + z^2) + e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneralForm {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
    pub e: BigRational,
}

impl GeneralForm {
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64, e: i64) -> Self {
        GeneralForm { a: rat(a), b: rat(b), c: rat(c), d: rat(d), e: rat(e) }
    }
}

/// Nondegeneracy: `c != 0`, `be != d^2` and `ad != b^2`.
pub fn nondegeneracy_check(g: &GeneralForm) -> bool {
    !g.c.is_zero() && &g.b * &g.e != &g.d * &g.d && &g.a * &g.d != &g.b * &g.b
}

impl Surface {
    pub fn new(family: FamilyId, k: i64) -> Self {
        Surface { family, k }
    }

    /// The polynomial in `x, y, z` with `k` substituted.
    pub fn poly(&self) -> Poly {
        family_poly(self.family).specialize_k(self.k)
    }

    /// Polynomial together with its gradient for exact evaluation.
    pub fn evaluator(&self) -> PolyTriple {
        PolyTriple::new(self.poly())
    }

    fn rat_args(p: &AffinePoint, k: i64) -> [BigRational; 4] {
        [p.x.clone(), p.y.clone(), p.z.clone(), rat(k)]
    }

    /// Exact value of the surface equation at a point.
    pub fn evaluate(&self, p: &AffinePoint) -> BigRational {
        family_poly(self.family).eval_rat(&Self::rat_args(p, self.k))
    }

    /// Exact gradient at a point.
    pub fn gradient(&self, p: &AffinePoint) -> [BigRational; 3] {
        let f = family_poly(self.family);
        let args = Self::rat_args(p, self.k);
        [f.derivative(0).eval_rat(&args), f.derivative(1).eval_rat(&args), f.derivative(2).eval_rat(&args)]
    }

    /// This surface written as a general symmetric form.
    pub fn general_form(&self) -> GeneralForm {
        match self.family {
            FamilyId::F1 => GeneralForm::from_ints(-4, 0, 0, 1, -self.k),
            FamilyId::F2 => GeneralForm::from_ints(16, -4, 0, 1, -self.k),
            FamilyId::F3 => GeneralForm::from_ints(-16, 4, 0, 1, -self.k),
        }
    }

    /// `k (4k + 1) ((4k - 5)^2 - 32)`, nonzero exactly when the projective
    /// model of the third family is smooth.
    pub fn smoothness_indicator(&self) -> BigInt {
        let k = BigInt::from(self.k);
        let a = &k * BigInt::from(4) + 1;
        let b = &k * BigInt::from(4) - 5;
        &k * a * (&b * &b - 32)
    }

    fn ac_int(&self, x: i128, y: i128) -> (i128, i128) {
        let (x2, y2) = (x * x, y * y);
        let k = self.k as i128;
        match self.family {
            FamilyId::F1 => (1 - 4 * x2 * y2, x2 + y2 - k),
            FamilyId::F2 => ((1 - 4 * x2) * (1 - 4 * y2), x2 + y2 - 4 * x2 * y2 - k),
            FamilyId::F3 => (1 + 4 * x2 + 4 * y2 - 16 * x2 * y2, x2 + y2 + 4 * x2 * y2 - k),
        }
    }
}

/// Named identities that hold on the surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IdentityId {
    /// `(4x^2 - 1)(4y^2 - 1)(4z^2 - 1) = 4k - 1` on the second family.
    F2Product,
    /// `(4x^2 + 1)(4y^2 + 1)(4z^2 + 1) = (4k + 1) + 128 x^2y^2z^2` on the third family.
    F3Product,
    /// `(4x^2 + 1)(1 + 4y^2 + 4z^2 - 16y^2z^2) = (4k + 1) - 32 y^2z^2` on the third family.
    F3Mixed,
    /// `(4x^2y^2 - 1)(4y^2z^2 - 1) = (2y^2 + 1)^2 - 4(k + 1)y^2` on the first family.
    F1Pair,
}

impl IdentityId {
    pub const ALL: [IdentityId; 4] = [IdentityId::F2Product, IdentityId::F3Product, IdentityId::F3Mixed, IdentityId::F1Pair];

    pub fn family(self) -> FamilyId {
        match self {
            IdentityId::F2Product => FamilyId::F2,
            IdentityId::F3Product | IdentityId::F3Mixed => FamilyId::F3,
            IdentityId::F1Pair => FamilyId::F1,
        }
    }

    /// Left and right sides as polynomials in `x, y, z, k`.
    pub fn sides(self) -> (Poly, Poly) {
        let one = Poly::constant(1);
        let k = Poly::k();
        let four_sq = |i: usize| sq(i).scale(4);
        match self {
            IdentityId::F2Product => {
                let l = &(&(&four_sq(0) - &one) * &(&four_sq(1) - &one)) * &(&four_sq(2) - &one);
                (l, &k.scale(4) - &one)
            }
            IdentityId::F3Product => {
                let l = &(&(&four_sq(0) + &one) * &(&four_sq(1) + &one)) * &(&four_sq(2) + &one);
                (l, &(&k.scale(4) + &one) + &triple().scale(128))
            }
            IdentityId::F3Mixed => {
                let inner = &(&(&one + &four_sq(1)) + &four_sq(2)) - &(&sq(1) * &sq(2)).scale(16);
                let l = &(&four_sq(0) + &one) * &inner;
                (l, &(&k.scale(4) + &one) - &(&sq(1) * &sq(2)).scale(32))
            }
            IdentityId::F1Pair => {
                let a = &(&sq(0) * &sq(1)).scale(4) - &one;
                let b = &(&sq(1) * &sq(2)).scale(4) - &one;
                let t = &sq(1).scale(2) + &one;
                let r = &(&t * &t) - &(&(&k + &one) * &sq(1)).scale(4);
                (&a * &b, r)
            }
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = self.sides();
        write!(f, "{l} = {r}")
    }
}

/// How to check an identity.
#[derive(Debug, Clone)]
pub enum IdentityInput {
    /// Exact polynomial identity modulo the family equation.
    Symbolic,
    /// Numerical check at a point of the surface.
    Point(AffinePoint),
}

/// Outcome of an identity check.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCertificate {
    pub identity: IdentityId,
    pub lhs: String,
    pub rhs: String,
    pub holds: bool,
    /// For the symbolic mode: the multiplier `q` with `lhs - rhs = q * F`.
    pub multiplier: Option<String>,
}

/// Verify an identity either symbolically (by exact division by the family
/// polynomial) or at a given point of the surface.
pub fn factored_identity(s: &Surface, which: IdentityId, input: &IdentityInput) -> Result<IdentityCertificate, SurfaceError> {
    if which.family() != s.family {
        return Err(SurfaceError::NotApplicable { identity: which, family: s.family });
    }
    let (l, r) = which.sides();
    match input {
        IdentityInput::Symbolic => {
            let diff = &l - &r;
            // F = Q - k, so divide by (k - Q) and negate the quotient.
            let q = family_q(s.family);
            let (quot, rem) = diff.divide_by_linear(3, &q);
            let multiplier = -&quot;
            let holds = rem.is_zero() && &multiplier * &family_poly(s.family) == diff;
            Ok(IdentityCertificate {
                identity: which,
                lhs: l.to_string(),
                rhs: r.to_string(),
                holds,
                multiplier: Some(multiplier.to_string()),
            })
        }
        IdentityInput::Point(p) => {
            let value = s.evaluate(p);
            if !value.is_zero() {
                return Err(SurfaceError::NotOnSurface { point: p.to_string(), value: value.to_string() });
            }
            let args = [p.x.clone(), p.y.clone(), p.z.clone(), rat(s.k)];
            let lv = l.eval_rat(&args);
            let rv = r.eval_rat(&args);
            Ok(IdentityCertificate { identity: which, lhs: lv.to_string(), rhs: rv.to_string(), holds: lv == rv, multiplier: None })
        }
    }
}

/// One orbit of integral points under the symmetry group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitRep {
    pub point: [i64; 3],
    pub orbit_size: usize,
}

/// Result of an integral point search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegralSearch {
    pub bound: u64,
    /// All points in the box, lexicographically sorted.
    pub points: Vec<[i64; 3]>,
    /// One lexicographically minimal representative per orbit.
    pub orbits: Vec<OrbitRep>,
}

impl IntegralSearch {
    /// Human-readable status. Search never proves emptiness.
    pub fn status(&self) -> String {
        if self.points.is_empty() {
            format!("empty up to bound {}", self.bound)
        } else {
            format!("{} points in {} orbits up to bound {}", self.points.len(), self.orbits.len(), self.bound)
        }
    }
}

/// All integral points with `|x|, |y|, |z| <= bound`.
///
/// Only `0 <= x <= y` is enumerated; `z` is solved from the equation, and
/// the full solution set is recovered by sign changes and permutations.
pub fn integral_point_search(s: &Surface, bound: u64) -> IntegralSearch {
    let b = bound as i128;
    let seeds: Vec<[i64; 3]> = (0..=b)
        .into_par_iter()
        .flat_map_iter(|x| {
            let mut found = Vec::new();
            for y in x..=b {
                let (a, c) = s.ac_int(x, y);
                if a == 0 {
                    // Never happens over the integers for these families,
                    // but stay correct: every z works when C vanishes.
                    if c == 0 {
                        for z in 0..=b {
                            found.push([x as i64, y as i64, z as i64]);
                        }
                    }
                    continue;
                }
                if (-c) % a != 0 {
                    continue;
                }
                let z2 = -c / a;
                if let Some(z) = exact_sqrt_i128(z2) {
                    if z <= b {
                        found.push([x as i64, y as i64, z as i64]);
                    }
                }
            }
            found
        })
        .collect();
    let mut all = BTreeSet::new();
    for p in seeds {
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            for signs in 0..8 {
                let mut q = [0i64; 3];
                for i in 0..3 {
                    let sgn = if signs >> i & 1 == 1 { -1 } else { 1 };
                    q[i] = sgn * p[perm[i]];
                }
                all.insert(q);
            }
        }
    }
    let points: Vec<[i64; 3]> = all.into_iter().collect();
    let mut seen = BTreeSet::new();
    let mut orbits = Vec::new();
    for p in &points {
        if seen.contains(p) {
            continue;
        }
        let orbit = orbit_int(*p);
        for q in &orbit {
            seen.insert(*q);
        }
        orbits.push(OrbitRep { point: orbit[0], orbit_size: orbit.len() });
    }
    IntegralSearch { bound, points, orbits }
}

fn height(n: i128, d: i128) -> i128 {
    n.abs().max(d)
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Rational points of height at most `h` with some non-integral coordinate,
/// one per orbit under sign changes and permutations, written with
/// nonnegative coordinates in ascending order.
///
/// The height of `n/d` in lowest terms is `max(|n|, d)`; every coordinate of
/// a returned point has height at most `h`.
pub fn rational_point_search(s: &Surface, h: u64) -> Vec<AffinePoint> {
    let h = h as i128;
    let mut fracs: Vec<(i128, i128)> = Vec::new();
    for d in 1..=h {
        for n in 0..=h {
            if gcd_i128(n, d) == 1 {
                fracs.push((n, d));
            }
        }
    }
    fracs.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
    let k = s.k as i128;
    let family = s.family;
    let found: BTreeSet<(i128, i128, i128, i128, i128, i128)> = (0..fracs.len())
        .into_par_iter()
        .flat_map_iter(|ix| {
            let mut out = Vec::new();
            let (a, b) = fracs[ix];
            for &(c, d) in &fracs[ix..] {
                let (a2, b2, c2, d2) = (a * a, b * b, c * c, d * d);
                let (num_a, num_c) = match family {
                    FamilyId::F1 => (b2 * d2 - 4 * a2 * c2, a2 * d2 + c2 * b2 - k * b2 * d2),
                    FamilyId::F2 => ((b2 - 4 * a2) * (d2 - 4 * c2), a2 * d2 + c2 * b2 - 4 * a2 * c2 - k * b2 * d2),
                    FamilyId::F3 => (b2 * d2 + 4 * a2 * d2 + 4 * c2 * b2 - 16 * a2 * c2, a2 * d2 + c2 * b2 + 4 * a2 * c2 - k * b2 * d2),
                };
                if num_a == 0 {
                    continue;
                }
                // z^2 = -num_c / num_a; reduce and test both parts for squares.
                let (mut zn, mut zd) = (-num_c, num_a);
                if zd < 0 {
                    zn = -zn;
                    zd = -zd;
                }
                if zn < 0 {
                    continue;
                }
                let g = gcd_i128(zn, zd);
                let (zn, zd) = (zn / g.max(1), zd / g.max(1));
                let (Some(rn), Some(rd)) = (exact_sqrt_i128(zn), exact_sqrt_i128(zd)) else { continue };
                if height(rn, rd) > h {
                    continue;
                }
                // Keep x <= y <= z so each orbit appears once.
                if rn * d < c * rd {
                    continue;
                }
                if b == 1 && d == 1 && rd == 1 {
                    continue;
                }
                out.push((a, b, c, d, rn, rd));
            }
            out
        })
        .collect();
    found
        .into_iter()
        .map(|(a, b, c, d, e, f)| {
            AffinePoint::new(
                BigRational::new(a.into(), b.into()),
                BigRational::new(c.into(), d.into()),
                BigRational::new(e.into(), f.into()),
            )
        })
        .collect()
}

/// Whether `target` occurs in `points` up to sign changes and permutations.
pub fn contains_up_to_symmetry(points: &[AffinePoint], target: &AffinePoint) -> bool {
    let t = target.canonical_unsigned();
    points.iter().any(|p| p.canonical_unsigned() == t)
}

/// Integer coordinates of a point, if integral and small.
pub fn integral_coords(p: &AffinePoint) -> Option<[i64; 3]> {
    if !p.is_integral() {
        return None;
    }
    Some([p.x.to_integer().to_i64()?, p.y.to_integer().to_i64()?, p.z.to_integer().to_i64()?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points_lie_on_surfaces() {
        assert!(Surface::new(FamilyId::F2, 574).evaluate(&AffinePoint::from_ints(1, 1, 8)).is_zero());
        assert!(Surface::new(FamilyId::F3, -2911).evaluate(&AffinePoint::from_ints(1, 4, 4)).is_zero());
        assert!(Surface::new(FamilyId::F1, 0).evaluate(&AffinePoint::from_ints(0, 0, 0)).is_zero());
        assert_eq!(Surface::new(FamilyId::F1, -17).evaluate(&AffinePoint::from_ints(1, 1, 1)), rat(16));
    }

    #[test]
    fn gradient_values() {
        let s = Surface::new(FamilyId::F1, -17);
        assert_eq!(s.gradient(&AffinePoint::from_ints(1, 1, 1)), [rat(-6), rat(-6), rat(-6)]);
        let half = BigRational::new(1.into(), 2.into());
        let p = AffinePoint::new(half.clone(), half, rat(7));
        let g = Surface::new(FamilyId::F2, 11).gradient(&p);
        assert!(g.iter().all(|c| c.is_zero()));
    }

    #[test]
    fn nondegeneracy_examples() {
        assert!(!nondegeneracy_check(&GeneralForm::from_ints(0, 0, -1, 1, 5)));
        assert!(nondegeneracy_check(&GeneralForm::from_ints(1, 1, 1, 2, 2)));
        for f in FamilyId::ALL {
            assert!(!nondegeneracy_check(&Surface::new(f, 7).general_form()));
        }
    }

    #[test]
    fn identities_hold_symbolically() {
        for id in IdentityId::ALL {
            let s = Surface::new(id.family(), 0);
            let cert = factored_identity(&s, id, &IdentityInput::Symbolic).unwrap();
            assert!(cert.holds, "{id}");
        }
    }

    #[test]
    fn identity_at_a_point() {
        let s = Surface::new(FamilyId::F2, 574);
        let c = factored_identity(&s, IdentityId::F2Product, &IdentityInput::Point(AffinePoint::from_ints(1, 1, 8))).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, "2295");
        let s1 = Surface::new(FamilyId::F1, -17);
        assert!(factored_identity(&s1, IdentityId::F1Pair, &IdentityInput::Point(AffinePoint::from_ints(1, 1, 1))).is_err());
        assert!(factored_identity(&s1, IdentityId::F3Product, &IdentityInput::Symbolic).is_err());
    }

    #[test]
    fn small_searches() {
        let s = integral_point_search(&Surface::new(FamilyId::F2, 574), 10);
        assert!(s.points.contains(&[1, 1, 8]));
        assert_eq!(s.points.len(), 24);
        let t = integral_point_search(&Surface::new(FamilyId::F1, 0), 2);
        assert!(t.points.contains(&[0, 0, 0]));
        assert!(rational_point_search(&Surface::new(FamilyId::F1, -17), 1).is_empty());
    }

    #[test]
    fn group_has_24_elements() {
        let g = symmetry_group();
        assert_eq!(g.len(), 24);
        assert_eq!(orbit_int([1, 2, 3]).len(), 24);
        assert_eq!(orbit_int([1, 1, 8]).len(), 12);
    }
}
