//! The rank-18 geometric Picard lattice of the `F3` family.
//!
//! Divisor classes come from the fibers `D_i`, the conic components `C_i^{ed}`
//! over the points `x_i = e sqrt(-1/4)`, and the 24 lines `l_ij^{ed}` and
//! `lbar_ij^{ed}` through the points `(e sqrt(a), d sqrt(abar))` and
//! `(e sqrt(abar), d sqrt(a))`, where `a, abar` are the roots of
//! `T^2 - (4k-1)/8 T + (4k+1)/32`. Pairings are computed from an incidence
//! model of these curves; the transcribed Gram matrix of the 18-class basis
//! is checked against it on construction.
//!
//! The Galois group of `Q(sqrt(-1), sqrt(a), sqrt(abar))` is `D4 x Z/2`,
//! generated by `sigma: sqrt(a) -> sqrt(abar) -> -sqrt(a)`, `tau` fixing
//! `sqrt(a)` and negating `sqrt(abar)`, and complex conjugation `rho`.
//! Cohomology `H^1(G, M)` is computed directly from the presentation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{kernel_quotient, quotient_coordinates, AbelianGroup, IntMatrix, LinalgError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("unknown divisor label {0:?}")]
    UnknownLabel(String),
    #[error("transcribed Gram matrix disagrees with the incidence model at ({0}, {1})")]
    Transcription(usize, usize),
    #[error("Gram determinant is {0}, expected -48")]
    Determinant(BigInt),
    #[error("class {0} has no integral expansion over the basis")]
    NonIntegral(String),
    #[error("matrix does not have order dividing {0}")]
    Order(u32),
    #[error("relation {0} does not hold")]
    Relation(String),
    #[error("sublattice is not stable under the action")]
    NotStable,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    fn parse(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// A named divisor class on the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DivisorLabel {
    /// Class of a fiber of the `i`-th projection.
    Fiber(u8),
    /// Irreducible singular fiber over `x_i = +-1/2` (class of `D_i`).
    NodalA(u8),
    /// Irreducible singular fiber over `x_i = +-sqrt(-1)/2` (class of `D_i`).
    NodalB(u8),
    /// Component of a reducible fiber over `x_i = e sqrt(-1/4)`.
    Conic { i: u8, e: Sign, d: Sign },
    /// Line `x_i = e sqrt(a), x_j = d sqrt(abar)` (or with `a, abar`
    /// exchanged when `conj`), with `i < j`.
    Line { i: u8, j: u8, e: Sign, d: Sign, conj: bool },
}

impl DivisorLabel {
    pub fn line(i: u8, j: u8, e: Sign, d: Sign, conj: bool) -> Self {
        if i < j {
            DivisorLabel::Line { i, j, e, d, conj }
        } else {
            // x_j = d sqrt(.), x_i = e sqrt(.) read from the other side
            DivisorLabel::Line { i: j, j: i, e: d, d: e, conj: !conj }
        }
    }

    /// Every label in the catalogue, fibers first.
    pub fn catalogue() -> Vec<DivisorLabel> {
        let signs = [Sign::Plus, Sign::Minus];
        let mut out: Vec<DivisorLabel> = (1..=3).map(DivisorLabel::Fiber).collect();
        out.extend((1..=3).map(DivisorLabel::NodalA));
        out.extend((1..=3).map(DivisorLabel::NodalB));
        for i in 1..=3 {
            for e in signs {
                for d in signs {
                    out.push(DivisorLabel::Conic { i, e, d });
                }
            }
        }
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            for conj in [false, true] {
                for e in signs {
                    for d in signs {
                        out.push(DivisorLabel::Line { i, j, e, d, conj });
                    }
                }
            }
        }
        out
    }

    /// `A_i` and `B_i` have the class of `D_i`.
    pub fn normalized(self) -> DivisorLabel {
        match self {
            DivisorLabel::NodalA(i) | DivisorLabel::NodalB(i) => DivisorLabel::Fiber(i),
            other => other,
        }
    }

    /// Coordinate values of a line: `(coordinate, uses abar, sign)`.
    fn line_points(self) -> [(u8, bool, Sign); 2] {
        match self {
            DivisorLabel::Line { i, j, e, d, conj } => [(i, conj, e), (j, !conj, d)],
            _ => unreachable!("not a line"),
        }
    }
}

impl fmt::Display for DivisorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            DivisorLabel::Fiber(i) => write!(f, "D{i}"),
            DivisorLabel::NodalA(i) => write!(f, "A{i}"),
            DivisorLabel::NodalB(i) => write!(f, "B{i}"),
            DivisorLabel::Conic { i, e, d } => write!(f, "C{i}{}{}", e.symbol(), d.symbol()),
            DivisorLabel::Line { i, j, e, d, conj } => {
                write!(f, "{}{i}{j}{}{}", if conj { "lbar" } else { "l" }, e.symbol(), d.symbol())
            }
        }
    }
}

impl FromStr for DivisorLabel {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LatticeError::UnknownLabel(s.to_string());
        let t = s.trim();
        let digit = |c: char| c.to_digit(10).filter(|d| (1..=3).contains(d)).map(|d| d as u8);
        let (head, rest) = if let Some(r) = t.strip_prefix("lbar") {
            ("lbar", r)
        } else {
            t.split_at(t.chars().next().map_or(0, char::len_utf8))
        };
        let cs: Vec<char> = rest.chars().collect();
        match (head, cs.as_slice()) {
            ("D", [i]) => digit(*i).map(DivisorLabel::Fiber).ok_or_else(bad),
            ("A", [i]) => digit(*i).map(DivisorLabel::NodalA).ok_or_else(bad),
            ("B", [i]) => digit(*i).map(DivisorLabel::NodalB).ok_or_else(bad),
            ("C", [i, e, d]) => Ok(DivisorLabel::Conic { i: digit(*i).ok_or_else(bad)?, e: Sign::parse(*e).ok_or_else(bad)?, d: Sign::parse(*d).ok_or_else(bad)? }),
            ("l" | "lbar", [i, j, e, d]) => {
                let (i, j) = (digit(*i).ok_or_else(bad)?, digit(*j).ok_or_else(bad)?);
                if i == j {
                    return Err(bad());
                }
                Ok(DivisorLabel::line(i, j, Sign::parse(*e).ok_or_else(bad)?, Sign::parse(*d).ok_or_else(bad)?, head == "lbar"))
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for DivisorLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Intersection number of two catalogue curves from their incidence.
pub fn geometric_pairing(a: DivisorLabel, b: DivisorLabel) -> i64 {
    use DivisorLabel::*;
    let (a, b) = (a.normalized(), b.normalized());
    if a == b {
        return if matches!(a, Fiber(_)) { 0 } else { -2 };
    }
    match (a, b) {
        (Fiber(_), Fiber(_)) => 2,
        (Fiber(i), Conic { i: c, .. }) | (Conic { i: c, .. }, Fiber(i)) => i64::from(c != i),
        (Fiber(k), l @ Line { .. }) | (l @ Line { .. }, Fiber(k)) => {
            let [(i, ..), (j, ..)] = l.line_points();
            i64::from(k != i && k != j)
        }
        (Conic { i: i1, e: e1, d: d1 }, Conic { i: i2, e: e2, d: d2 }) => {
            if i1 == i2 {
                if e1 != e2 {
                    0
                } else {
                    2
                }
            } else {
                i64::from(e1.value() * d1.value() == e2.value() * d2.value())
            }
        }
        (Conic { i: c, d, .. }, l @ Line { .. }) | (l @ Line { .. }, Conic { i: c, d, .. }) => {
            let [(i, _, s1), (j, _, s2)] = l.line_points();
            if c == i || c == j {
                0
            } else {
                i64::from(s1.value() * s2.value() == d.value())
            }
        }
        (l1 @ Line { .. }, l2 @ Line { .. }) => {
            let p1 = l1.line_points();
            let p2 = l2.line_points();
            let c1 = [p1[0].0, p1[1].0];
            let c2 = [p2[0].0, p2[1].0];
            if c1 == c2 {
                return 0;
            }
            // the one shared coordinate
            let m = c1.iter().find(|c| c2.contains(c)).copied().expect("two coordinate pairs out of three share one");
            let v1 = p1.iter().find(|p| p.0 == m).unwrap();
            let v2 = p2.iter().find(|p| p.0 == m).unwrap();
            i64::from(v1 == v2)
        }
        _ => unreachable!("normalized labels"),
    }
}

fn parse_labels(names: &[&str]) -> Vec<DivisorLabel> {
    names.iter().map(|n| n.parse().expect("built-in label")).collect()
}

/// The 18-class basis.
pub fn standard_basis() -> Vec<DivisorLabel> {
    parse_labels(&[
        "D1", "D2", "D3", "l12++", "l12+-", "l13++", "l23++", "l12-+", "l13-+", "l23--", "lbar12++", "lbar12+-", "lbar13++", "lbar23++", "lbar12-+", "lbar13-+",
        "C1+-", "C2+-",
    ])
}

/// The basis adapted to the elliptic fibration over the first coordinate:
/// fiber, zero section `l23++`, fiber components and further sections.
pub fn fibration_basis() -> Vec<DivisorLabel> {
    parse_labels(&[
        "D1", "l23++", "l12++", "l12+-", "l13+-", "l12--", "l12-+", "l13--", "lbar12++", "lbar12+-", "lbar13+-", "lbar12--", "lbar12-+", "lbar13--", "lbar23++", "l23+-",
        "C2+-", "C3+-",
    ])
}

const GRAM: [[i64; 18]; 18] = [
    [0, 2, 2, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1],
    [2, 0, 2, 0, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 1, 1, 0],
    [2, 2, 0, 1, 1, 0, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1],
    [0, 0, 1, -2, 0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 1, 0, -2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 1, 1, -2, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 1, -2, 0, 1, 0, 1, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, -2, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 1, 1, -2, 0, 0, 0, 0, 0, 0, 0, 0, 1],
    [1, 0, 0, 0, 0, 0, 0, 0, 0, -2, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 0, -2, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, -2, 1, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, -2, 1, 0, 0, 0, 0],
    [1, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, -2, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, -2, 1, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, -2, 0, 1],
    [0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -2, 1],
    [1, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, -2],
];

/// Expansions over the standard basis of the eleven lines outside it.
const EXPANSION_ROWS: [(&str, [i64; 18]); 11] = [
    ("lbar12--", [0, 1, -1, 0, 0, 1, 1, 0, 1, -1, 0, -1, 0, 0, 0, 0, 0, 0]),
    ("l12--", [2, 1, -1, -1, -1, -1, -1, -1, -1, 1, -1, 0, 0, 0, -1, 0, 0, 0]),
    ("lbar23--", [-2, 0, 0, 1, 0, 1, 1, 1, 1, -1, 1, 0, 1, 1, 1, 1, 0, 0]),
    ("l13--", [-1, -1, 1, 1, 1, 1, 1, 0, 0, -1, 1, 0, 0, 0, 1, 0, 0, 0]),
    ("lbar13--", [1, -1, 1, 0, 0, -1, -1, 0, -1, 1, 0, 1, 0, 0, -1, -1, 0, 0]),
    ("l13+-", [1, 0, 0, -1, -1, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
    ("lbar13+-", [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, -1, 0, 0, 0, 0, 0]),
    ("l23+-", [0, 1, 0, 0, 0, 0, -1, 0, 0, 0, -1, 0, 0, 0, -1, 0, 0, 0]),
    ("lbar23+-", [0, 1, 0, -1, 0, 0, 0, -1, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0]),
    ("l23-+", [0, 0, 1, 0, 0, -1, -1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0]),
    ("lbar23-+", [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, 0, -1, 0, 0]),
];

/// A displayed matrix for `sigma` on the first 16 basis classes (rows act on
/// the column vector of classes). Kept for comparison with the action
/// reconstructed from the curve incidences.
const DISPLAYED_SIGMA_BLOCK: [[i64; 16]; 16] = [
    [1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, -1, -1, 0, 0, 0, -1, 0, 0, 0, 0],
    [0, 1, 0, -1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1],
    [0, 1, -1, 0, 0, 0, 0, -1, 0, 1, 1, 0, 0, 1, -1, 0],
    [1, -1, 1, 0, 0, 0, 0, 1, -1, -1, -1, 0, -1, -1, 1, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, -1, -1, 0, 0, -1],
    [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [2, 1, -1, -1, -1, -1, -1, 0, -1, -1, -1, 0, 0, -1, 1, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, -1, -1, 0, 0, -1, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
];

/// Expected Gram determinant of the standard basis.
pub const GRAM_DETERMINANT: i64 = -48;

/// The Picard lattice with its basis, Gram matrix and expansion table.
#[derive(Debug, Clone)]
pub struct PicardLattice {
    pub basis: Vec<DivisorLabel>,
    pub gram: IntMatrix,
    pub expansions: BTreeMap<DivisorLabel, Vec<i64>>,
}

/// Build the lattice from the transcribed Gram matrix, checking it against
/// the incidence model and its determinant.
pub fn build_lattice() -> Result<PicardLattice, LatticeError> {
    let basis = standard_basis();
    let gram = IntMatrix::from_rows(&GRAM);
    for (a, la) in basis.iter().enumerate() {
        for (b, lb) in basis.iter().enumerate() {
            if geometric_pairing(*la, *lb) != GRAM[a][b] {
                return Err(LatticeError::Transcription(a, b));
            }
        }
    }
    let det = gram.det()?;
    if det != BigInt::from(GRAM_DETERMINANT) {
        return Err(LatticeError::Determinant(det));
    }
    let inv = gram.inverse_rational()?;
    let mut expansions = BTreeMap::new();
    for label in DivisorLabel::catalogue() {
        let pairings: Vec<i64> = basis.iter().map(|s| geometric_pairing(label, *s)).collect();
        let mut v = Vec::with_capacity(18);
        for row in &inv {
            let c: BigRational = row.iter().zip(&pairings).map(|(g, p)| g * BigRational::from_integer(BigInt::from(*p))).sum();
            if !c.is_integer() {
                return Err(LatticeError::NonIntegral(label.to_string()));
            }
            v.push(c.to_integer().to_i64().expect("small coefficient"));
        }
        expansions.insert(label, v);
    }
    Ok(PicardLattice { basis, gram, expansions })
}

impl PicardLattice {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a catalogue class over the basis.
    pub fn expand(&self, label: DivisorLabel) -> Result<&[i64], LatticeError> {
        self.expansions.get(&label).map(Vec::as_slice).ok_or_else(|| LatticeError::UnknownLabel(label.to_string()))
    }

    pub fn expand_str(&self, name: &str) -> Result<&[i64], LatticeError> {
        self.expand(name.parse()?)
    }

    /// Integer combination of catalogue classes, as basis coordinates.
    pub fn combination(&self, terms: &[(i64, &str)]) -> Result<Vec<i64>, LatticeError> {
        let mut v = vec![0i64; self.rank()];
        for (c, name) in terms {
            for (acc, x) in v.iter_mut().zip(self.expand_str(name)?) {
                *acc += c * x;
            }
        }
        Ok(v)
    }

    /// Intersection of two coordinate vectors.
    pub fn pair(&self, a: &[i64], b: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                acc += self.gram.get(i, j) * (x * y);
            }
        }
        acc
    }

    /// Whether the expansion of every catalogue class reproduces its
    /// incidence pairings with the whole basis.
    pub fn expansions_consistent(&self) -> bool {
        self.expansions.iter().all(|(label, v)| {
            self.basis.iter().enumerate().all(|(j, s)| {
                let e: Vec<i64> = (0..self.rank()).map(|i| i64::from(i == j)).collect();
                self.pair(v, &e) == BigInt::from(geometric_pairing(*label, *s))
            })
        })
    }

    /// Gram matrix of an arbitrary list of catalogue classes.
    pub fn gram_of(&self, labels: &[DivisorLabel]) -> IntMatrix {
        IntMatrix::from_fn(labels.len(), labels.len(), |a, b| BigInt::from(geometric_pairing(labels[a], labels[b])))
    }

    /// Matrix whose columns are the expansions of `labels`.
    pub fn expansion_matrix(&self, labels: &[DivisorLabel]) -> Result<IntMatrix, LatticeError> {
        let cols: Result<Vec<&[i64]>, _> = labels.iter().map(|l| self.expand(*l)).collect();
        let cols = cols?;
        Ok(IntMatrix::from_fn(self.rank(), labels.len(), |i, j| BigInt::from(cols[j][i])))
    }

    /// Whether the transcribed expansion rows of the eleven remaining lines agree.
    pub fn expansion_rows_match(&self) -> bool {
        EXPANSION_ROWS.iter().all(|(name, row)| self.expand_str(name).is_ok_and(|v| v == row))
    }

    /// Matrix of a label permutation: column `b` is the expansion of the
    /// image of basis class `b`.
    pub fn action_matrix(&self, f: impl Fn(DivisorLabel) -> DivisorLabel) -> Result<IntMatrix, LatticeError> {
        let images: Vec<DivisorLabel> = self.basis.iter().map(|l| f(*l)).collect();
        self.expansion_matrix(&images)
    }
}

/// Galois generators acting on catalogue labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    Sigma,
    Tau,
    Rho,
}

impl Generator {
    pub const ALL: [Generator; 3] = [Generator::Sigma, Generator::Tau, Generator::Rho];

    pub fn name(self) -> &'static str {
        match self {
            Generator::Sigma => "sigma",
            Generator::Tau => "tau",
            Generator::Rho => "rho",
        }
    }

    /// Image of a curve under the field automorphism.
    pub fn apply(self, l: DivisorLabel) -> DivisorLabel {
        use DivisorLabel::*;
        match (self, l) {
            (_, Fiber(_) | NodalA(_) | NodalB(_)) => l,
            // sqrt(a) sqrt(abar) changes sign under sigma and tau
            (Generator::Sigma | Generator::Tau, Conic { i, e, d }) => Conic { i, e, d: d.flip() },
            (Generator::Rho, Conic { i, e, d }) => Conic { i, e: e.flip(), d },
            (Generator::Rho, Line { .. }) => l,
            (Generator::Sigma, Line { i, j, e, d, conj: false }) => Line { i, j, e, d: d.flip(), conj: true },
            (Generator::Sigma, Line { i, j, e, d, conj: true }) => Line { i, j, e: e.flip(), d, conj: false },
            (Generator::Tau, Line { i, j, e, d, conj: false }) => Line { i, j, e, d: d.flip(), conj: false },
            (Generator::Tau, Line { i, j, e, d, conj: true }) => Line { i, j, e: e.flip(), d, conj: true },
        }
    }
}

/// Relator words of `D4 x Z/2 = (<sigma> x| <tau>) x <rho>` as generator
/// indices into `[sigma, tau, rho]`.
pub fn relators() -> Vec<Vec<usize>> {
    let (s, t, r) = (0, 1, 2);
    vec![vec![s, s, s, s], vec![t, t], vec![r, r], vec![t, s, t, s], vec![s, r, s, s, s, r], vec![t, r, t, r]]
}

/// Matrices of the generators on a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAction {
    pub sigma: IntMatrix,
    pub tau: IntMatrix,
    pub rho: IntMatrix,
}

impl GroupAction {
    /// The action on the Picard lattice induced by the label permutations.
    pub fn on_picard(l: &PicardLattice) -> Result<Self, LatticeError> {
        Ok(GroupAction {
            sigma: l.action_matrix(|d| Generator::Sigma.apply(d))?,
            tau: l.action_matrix(|d| Generator::Tau.apply(d))?,
            rho: l.action_matrix(|d| Generator::Rho.apply(d))?,
        })
    }

    pub fn generators(&self) -> [&IntMatrix; 3] {
        [&self.sigma, &self.tau, &self.rho]
    }

    pub fn dim(&self) -> usize {
        self.sigma.rows()
    }

    pub fn map(&self, f: impl Fn(&IntMatrix) -> Result<IntMatrix, LatticeError>) -> Result<Self, LatticeError> {
        Ok(GroupAction { sigma: f(&self.sigma)?, tau: f(&self.tau)?, rho: f(&self.rho)? })
    }

    /// Whether every generator preserves the form `gram`.
    pub fn is_isometry(&self, gram: &IntMatrix) -> bool {
        self.generators().iter().all(|m| is_isometry(m, gram))
    }

    pub fn presentation_holds(&self) -> bool {
        relators().iter().all(|w| word_product(&self.generators(), w).is_identity())
    }

    pub fn h1(&self) -> Result<AbelianGroup, LatticeError> {
        h1_group(&self.generators(), &relators())
    }

    /// Conjugate by a change of basis `q` (columns are the new basis).
    pub fn conjugate(&self, q: &IntMatrix, q_inv: &IntMatrix) -> Self {
        let c = |m: &IntMatrix| q_inv.mul(m).mul(q);
        GroupAction { sigma: c(&self.sigma), tau: c(&self.tau), rho: c(&self.rho) }
    }
}

/// `m^T g m = g`.
pub fn is_isometry(m: &IntMatrix, gram: &IntMatrix) -> bool {
    m.transpose().mul(gram).mul(m) == *gram
}

fn word_product(gens: &[&IntMatrix], word: &[usize]) -> IntMatrix {
    let n = gens[0].rows();
    word.iter().fold(IntMatrix::identity(n), |acc, &g| acc.mul(gens[g]))
}

/// `H^1` of a cyclic group of order `n` generated by `g`, as
/// `ker(1 + g + ... + g^(n-1)) / (1 - g) M`.
pub fn h1_cyclic(g: &IntMatrix, n: u32) -> Result<AbelianGroup, LatticeError> {
    if !g.pow(n).is_identity() {
        return Err(LatticeError::Order(n));
    }
    let id = IntMatrix::identity(g.rows());
    let mut norm = IntMatrix::zeros(g.rows(), g.rows());
    let mut p = id.clone();
    for _ in 0..n {
        norm = norm.add(&p);
        p = p.mul(g);
    }
    Ok(kernel_quotient(&norm, &id.sub(g))?)
}

/// `H^1` of a finitely presented group: crossed homomorphisms are the
/// generator values killed by every relator, modulo principal ones.
pub fn h1_group(gens: &[&IntMatrix], relators: &[Vec<usize>]) -> Result<AbelianGroup, LatticeError> {
    let n = gens.first().map_or(0, |g| g.rows());
    let id = IntMatrix::identity(n);
    let mut blocks = Vec::new();
    for w in relators {
        if !word_product(gens, w).is_identity() {
            return Err(LatticeError::Relation(format!("{w:?}")));
        }
        // c(g1 g2 ... gm) = c(g1) + g1 c(g2) + ... + g1...g(m-1) c(gm)
        let mut row = vec![IntMatrix::zeros(n, n); gens.len()];
        let mut prefix = id.clone();
        for &g in w {
            row[g] = row[g].add(&prefix);
            prefix = prefix.mul(gens[g]);
        }
        let refs: Vec<&IntMatrix> = row.iter().collect();
        blocks.push(IntMatrix::hstack(&refs)?);
    }
    let relation = if blocks.is_empty() {
        IntMatrix::zeros(0, n * gens.len())
    } else {
        let refs: Vec<&IntMatrix> = blocks.iter().collect();
        IntMatrix::vstack(&refs)?
    };
    let cob: Vec<IntMatrix> = gens.iter().map(|g| g.sub(&id)).collect();
    let refs: Vec<&IntMatrix> = cob.iter().collect();
    Ok(kernel_quotient(&relation, &IntMatrix::vstack(&refs)?)?)
}

/// Saturated basis (columns) of the fixed sublattice of `g`.
pub fn fixed_sublattice(g: &IntMatrix) -> IntMatrix {
    g.sub(&IntMatrix::identity(g.rows())).kernel()
}

/// Matrix of `g` on a `g`-stable sublattice with basis columns `basis`.
pub fn restrict(g: &IntMatrix, basis: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    basis.solve(&g.mul(basis)).map_err(|_| LatticeError::NotStable)
}

/// Rank and torsion of `Z^n / span(sub)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientDescription {
    pub rank: usize,
    pub torsion: Vec<u64>,
}

pub fn quotient_by(sub: &IntMatrix) -> QuotientDescription {
    let s = sub.smith();
    QuotientDescription { rank: sub.rows() - s.rank(), torsion: s.torsion().iter().map(|v| v.to_u64().expect("small")).collect() }
}

/// Basis columns of the fiber classes `D_1, D_2, D_3`.
pub fn fiber_span(l: &PicardLattice) -> Result<IntMatrix, LatticeError> {
    l.expansion_matrix(&parse_labels(&["D1", "D2", "D3"]))
}

/// The lattice of the affine surface: the quotient by the fiber classes.
pub fn quotient_by_fibers(l: &PicardLattice) -> Result<QuotientDescription, LatticeError> {
    Ok(quotient_by(&fiber_span(l)?))
}

/// Coordinates on a torsion-free quotient together with the induced action.
#[derive(Debug, Clone)]
pub struct QuotientLattice {
    /// Projection onto quotient coordinates.
    pub projection: IntMatrix,
    pub action: GroupAction,
}

/// The action on `Z^n / span(sub)`, for a stable torsion-free quotient.
pub fn quotient_action(action: &GroupAction, sub: &IntMatrix) -> Result<QuotientLattice, LatticeError> {
    let (proj, lift, torsion) = quotient_coordinates(sub)?;
    if !torsion.is_empty() {
        return Err(LatticeError::Linalg(LinalgError::Shape("quotient has torsion".into())));
    }
    let induced = action.map(|g| {
        if !proj.mul(g).mul(sub).is_zero() {
            return Err(LatticeError::NotStable);
        }
        Ok(proj.mul(g).mul(&lift))
    })?;
    Ok(QuotientLattice { projection: proj, action: induced })
}

/// The classes of the affine surface with the induced Galois action.
pub fn affine_lattice(l: &PicardLattice, action: &GroupAction) -> Result<QuotientLattice, LatticeError> {
    quotient_action(action, &fiber_span(l)?)
}

/// Cohomology of the geometric Picard lattices of the projective and affine
/// surfaces, together with the cyclic pieces of the inflation-restriction route.
#[derive(Debug, Clone, Serialize)]
pub struct CohomologySummary {
    pub projective: AbelianGroup,
    pub affine: AbelianGroup,
    pub rho_projective: AbelianGroup,
    pub rho_affine: AbelianGroup,
    /// `H^1(<sigma>, M^rho)` for the projective and affine lattices.
    pub sigma_on_rho_invariants_projective: AbelianGroup,
    pub sigma_on_rho_invariants_affine: AbelianGroup,
    /// `H^1(<tau>, M^<sigma, rho>)`.
    pub tau_on_invariants_projective: AbelianGroup,
    pub tau_on_invariants_affine: AbelianGroup,
}

fn cyclic_pieces(a: &GroupAction) -> Result<(AbelianGroup, AbelianGroup, AbelianGroup), LatticeError> {
    let rho = h1_cyclic(&a.rho, 2)?;
    let inv_rho = fixed_sublattice(&a.rho);
    let sigma = h1_cyclic(&restrict(&a.sigma, &inv_rho)?, 4)?;
    let inv = IntMatrix::hstack(&[&a.sigma.sub(&IntMatrix::identity(a.dim())).transpose(), &a.rho.sub(&IntMatrix::identity(a.dim())).transpose()])?
        .transpose()
        .kernel();
    let tau = h1_cyclic(&restrict(&a.tau, &inv)?, 2)?;
    Ok((rho, sigma, tau))
}

pub fn cohomology_summary(l: &PicardLattice, action: &GroupAction) -> Result<CohomologySummary, LatticeError> {
    let affine = affine_lattice(l, action)?;
    let (rp, sp, tp) = cyclic_pieces(action)?;
    let (ra, sa, ta) = cyclic_pieces(&affine.action)?;
    Ok(CohomologySummary {
        projective: action.h1()?,
        affine: affine.action.h1()?,
        rho_projective: rp,
        rho_affine: ra,
        sigma_on_rho_invariants_projective: sp,
        sigma_on_rho_invariants_affine: sa,
        tau_on_invariants_projective: tp,
        tau_on_invariants_affine: ta,
    })
}

/// Outcome of checking one stated linear relation between classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationCheck {
    pub relation: String,
    pub holds: bool,
}

/// Check `lhs = sum rhs` in the lattice.
fn relation(l: &PicardLattice, lhs: &[(i64, &str)], rhs: &[(i64, &str)]) -> Result<RelationCheck, LatticeError> {
    let render = |t: &[(i64, &str)]| {
        t.iter()
            .enumerate()
            .map(|(n, (c, s))| match (n, *c) {
                (0, 1) => s.to_string(),
                (0, -1) => format!("-{s}"),
                (_, 1) => format!(" + {s}"),
                (_, -1) => format!(" - {s}"),
                (_, c) => format!(" + {c} {s}"),
            })
            .collect::<String>()
    };
    Ok(RelationCheck { relation: format!("{} = {}", render(lhs), render(rhs)), holds: l.combination(lhs)? == l.combination(rhs)? })
}

/// The linear relations between fiber, conic and line classes.
pub fn relation_checks(l: &PicardLattice) -> Result<Vec<RelationCheck>, LatticeError> {
    let mut out = Vec::new();
    // each fiber D_i splits as the four lines through a point of x_i with
    // fixed first sign, in either conjugate form
    for i in 1..=3u8 {
        let others: Vec<u8> = (1..=3).filter(|&j| j != i).collect();
        for e in [Sign::Plus, Sign::Minus] {
            for conj in [false, true] {
                let mut names = Vec::new();
                for &j in &others {
                    for d in [Sign::Plus, Sign::Minus] {
                        // line with x_i carrying the sign e
                        let lab = if conj { DivisorLabel::line(i, j, e, d, true) } else { DivisorLabel::line(i, j, e, d, false) };
                        names.push(lab.to_string());
                    }
                }
                let rhs: Vec<(i64, &str)> = names.iter().map(|n| (1, n.as_str())).collect();
                out.push(relation(l, &[(1, &format!("D{i}"))], &rhs)?);
            }
        }
    }
    for i in 1..=3 {
        let (pm, mm, pp) = (format!("C{i}+-"), format!("C{i}--"), format!("C{i}++"));
        out.push(relation(l, &[(1, &mm)], &[(1, &pm)])?);
        out.push(relation(l, &[(1, &pp)], &[(1, &format!("D{i}")), (-1, &pm)])?);
    }
    out.push(relation(
        l,
        &[(1, "C3+-")],
        &[(1, "l12++"), (1, "l13++"), (1, "l23++"), (1, "lbar12++"), (1, "lbar13++"), (1, "lbar23++"), (-1, "C1+-"), (-1, "C2+-")],
    )?);
    Ok(out)
}

/// Whether a stated list of generators lies in, and spans, a kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelCheck {
    pub lattice: &'static str,
    pub operator: String,
    pub claimed_generators: usize,
    pub contained: bool,
    pub claimed_rank: usize,
    pub kernel_rank: usize,
    /// Index of the span of the claimed generators in the (saturated)
    /// kernel, when the ranks agree.
    pub index: Option<u64>,
}

fn kernel_check(lattice: &'static str, operator: &str, op: &IntMatrix, claimed: &[Vec<i64>]) -> KernelCheck {
    let kernel = op.kernel();
    let n = op.cols();
    let gens = IntMatrix::from_fn(n, claimed.len(), |i, j| BigInt::from(claimed[j][i]));
    let contained = claimed.is_empty() || op.mul(&gens).is_zero();
    let claimed_rank = gens.rank();
    let index = (contained && claimed_rank == kernel.cols()).then(|| {
        // coordinates of the generators in the kernel basis
        let coords = kernel.solve(&gens).expect("generators lie in the saturated kernel");
        coords.smith().diagonal().iter().map(|d| d.to_u64().expect("small")).product()
    });
    KernelCheck { lattice, operator: operator.to_string(), claimed_generators: claimed.len(), contained, claimed_rank, kernel_rank: kernel.cols(), index }
}

/// Comparison of the reconstructed action with the displayed data.
#[derive(Debug, Clone, Serialize)]
pub struct DiscrepancyReport {
    pub gram_matches_incidence: bool,
    pub expansion_rows_match: bool,
    pub reconstructed_isometries: bool,
    pub reconstructed_presentation: bool,
    /// The displayed 16x16 block preserves the Gram form of the first 16 classes.
    pub displayed_sigma_block_is_isometry: bool,
    /// The displayed block equals the reconstructed one (or its transpose).
    pub displayed_sigma_block_matches: bool,
    /// The reconstructed `sigma` maps the first 16 classes into their span.
    pub reconstructed_sigma_block_stable: bool,
    pub relations: Vec<RelationCheck>,
    pub kernels: Vec<KernelCheck>,
}

impl DiscrepancyReport {
    pub fn has_discrepancies(&self) -> bool {
        !(self.displayed_sigma_block_is_isometry && self.displayed_sigma_block_matches)
            || self.relations.iter().any(|r| !r.holds)
            || self.kernels.iter().any(|k| !k.contained || k.index != Some(1))
    }
}

fn combos(l: &PicardLattice, terms: &[&[(i64, &str)]]) -> Result<Vec<Vec<i64>>, LatticeError> {
    terms.iter().map(|t| l.combination(t)).collect()
}

pub fn discrepancy_report(l: &PicardLattice, action: &GroupAction) -> Result<DiscrepancyReport, LatticeError> {
    let n = l.rank();
    let id = IntMatrix::identity(n);
    let shown = IntMatrix::from_rows(&DISPLAYED_SIGMA_BLOCK);
    let g16 = l.gram.submatrix(0..16, 0..16);
    let block = action.sigma.submatrix(0..16, 0..16);
    let stable = action.sigma.submatrix(16..n, 0..16).is_zero();

    let norm = (0..4).fold(IntMatrix::zeros(n, n), |acc, i| acc.add(&action.sigma.pow(i)));
    let sigma_rho_fixed = IntMatrix::vstack(&[&action.sigma.sub(&id), &action.rho.sub(&id)])?;
    let sixteen: Vec<Vec<i64>> = (0..16).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    let mut kernels = vec![
        kernel_check("projective", "1 + rho", &id.add(&action.rho), &combos(l, &[&[(1, "C1+-"), (-1, "C1--")], &[(1, "C2+-"), (-1, "C2--")]])?),
        kernel_check("projective", "1 - rho", &id.sub(&action.rho), &sixteen),
        kernel_check(
            "projective",
            "1 + sigma + sigma^2 + sigma^3 on rho-invariants",
            &IntMatrix::vstack(&[&norm, &action.rho.sub(&id)])?,
            &combos(
                l,
                &[
                    &[(1, "D1"), (-1, "lbar12-+"), (-1, "lbar12++"), (-1, "lbar13++"), (-1, "lbar13-+")],
                    &[(1, "D2"), (-1, "lbar12-+"), (-1, "lbar12++"), (-1, "l23--"), (-1, "lbar23++")],
                    &[(1, "D3"), (-1, "lbar13++"), (-1, "lbar13-+"), (-1, "l23--"), (-1, "lbar23++")],
                    &[(1, "l12++"), (-1, "lbar12-+")],
                    &[(1, "l12+-"), (-1, "lbar12++")],
                    &[(1, "l12-+"), (-1, "lbar12++")],
                    &[(1, "lbar12+-"), (-1, "lbar12-+")],
                    &[(1, "l13++"), (-1, "lbar13-+")],
                    &[(1, "l13-+"), (-1, "lbar13++")],
                    &[(1, "l23++"), (-1, "l23--")],
                ],
            )?,
        ),
    ];
    let fixed_claim = combos(
        l,
        &[
            &[(1, "D1")],
            &[(1, "D2")],
            &[(1, "D3")],
            &[(1, "l12+-"), (1, "l12++"), (-1, "lbar12+-"), (1, "lbar12-+"), (2, "l13++"), (-1, "lbar13++"), (1, "lbar13-+"), (1, "l23++"), (-1, "l23--")],
            &[(1, "l12-+"), (1, "l12++"), (1, "lbar13++"), (1, "lbar13-+"), (-1, "l23++"), (-1, "l23--"), (2, "lbar23++")],
            &[(1, "lbar12++"), (-2, "l12++"), (-1, "lbar12-+"), (-1, "l13++"), (1, "l13-+"), (-2, "lbar13-+"), (1, "l23++"), (1, "l23--"), (-2, "lbar23++")],
        ],
    )?;
    kernels.push(kernel_check("projective", "1 - sigma on rho-invariants", &sigma_rho_fixed, &fixed_claim));

    // Affine lattice, in quotient coordinates.
    let affine = affine_lattice(l, action)?;
    let p = &affine.projection;
    let project = |v: Vec<Vec<i64>>| -> Vec<Vec<i64>> {
        v.into_iter()
            .map(|x| {
                let col = p.mul(&IntMatrix::column_vector(&x.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>()));
                col.column(0).iter().map(|c| c.to_i64().expect("small")).collect()
            })
            .collect()
    };
    let m = affine.action.dim();
    let aid = IntMatrix::identity(m);
    let a = &affine.action;
    let anorm = (0..4).fold(IntMatrix::zeros(m, m), |acc, i| acc.add(&a.sigma.pow(i)));
    let lines13: Vec<&str> = vec!["l12++", "l12+-", "l13++", "l23++", "l12-+", "l13-+", "l23--", "lbar12++", "lbar12+-", "lbar13++", "lbar23++", "lbar12-+", "lbar13-+"];
    kernels.push(kernel_check("affine", "1 + rho", &aid.add(&a.rho), &project(combos(l, &[&[(1, "C1+-"), (-1, "C1--")], &[(1, "C2+-"), (-1, "C2--")]])?)));
    kernels.push(kernel_check("affine", "1 - rho", &aid.sub(&a.rho), &project(lines13.iter().map(|s| l.combination(&[(1, s)])).collect::<Result<_, _>>()?)));
    kernels.push(kernel_check(
        "affine",
        "1 + sigma + sigma^2 + sigma^3 on rho-invariants",
        &IntMatrix::vstack(&[&anorm, &a.rho.sub(&aid)])?,
        &project(combos(
            l,
            &[
                &[(1, "l12++"), (-1, "lbar12-+")],
                &[(1, "l12+-"), (1, "lbar12-+")],
                &[(1, "l12-+"), (1, "lbar12-+")],
                &[(1, "lbar12++"), (1, "lbar12-+")],
                &[(1, "lbar12+-"), (-1, "lbar12-+")],
                &[(1, "l13++"), (-1, "lbar13-+")],
                &[(1, "l13-+"), (1, "lbar13-+")],
                &[(1, "lbar13++"), (1, "lbar13-+")],
                &[(1, "l23++"), (1, "lbar23++")],
                &[(1, "l23--"), (1, "lbar23++")],
            ],
        )?),
    ));
    kernels.push(kernel_check("affine", "1 - sigma on rho-invariants", &IntMatrix::vstack(&[&a.sigma.sub(&aid), &a.rho.sub(&aid)])?, &project(fixed_claim[3..].to_vec())));

    Ok(DiscrepancyReport {
        gram_matches_incidence: true,
        expansion_rows_match: l.expansion_rows_match(),
        reconstructed_isometries: action.is_isometry(&l.gram),
        reconstructed_presentation: action.presentation_holds(),
        displayed_sigma_block_is_isometry: is_isometry(&shown, &g16) || is_isometry(&shown.transpose(), &g16),
        displayed_sigma_block_matches: shown == block || shown.transpose() == block,
        reconstructed_sigma_block_stable: stable,
        relations: relation_checks(l)?,
        kernels,
    })
}

/// The three involutions `sigma_k^*` on `Z D_1 + Z D_2 + Z D_3`, columns
/// being the images of `D_1, D_2, D_3`.
pub fn fiber_involutions() -> [IntMatrix; 3] {
    [
        IntMatrix::from_rows(&[[-1, 0, 0], [2, 1, 0], [2, 0, 1]]),
        IntMatrix::from_rows(&[[1, 2, 0], [0, -1, 0], [0, 2, 1]]),
        IntMatrix::from_rows(&[[1, 0, 2], [0, 1, 2], [0, 0, -1]]),
    ]
}

/// The form `D_i^2 = 0`, `D_i . D_j = 2`.
pub fn fiber_form() -> IntMatrix {
    IntMatrix::from_rows(&[[0, 2, 2], [2, 0, 2], [2, 2, 0]])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvolutionCheck {
    pub name: String,
    pub isometry: bool,
    pub involutive: bool,
}

pub fn check_involution(name: &str, m: &IntMatrix) -> InvolutionCheck {
    InvolutionCheck { name: name.to_string(), isometry: is_isometry(m, &fiber_form()), involutive: m.mul(m).is_identity() }
}

pub fn involution_isometry_check() -> Vec<InvolutionCheck> {
    fiber_involutions().iter().enumerate().map(|(i, m)| check_involution(&format!("sigma{}*", i + 1), m)).collect()
}

/// Why a half-sum candidate is not a class of the lattice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfSumVerdict {
    /// `E^2` is odd, impossible in an even lattice.
    OddSelfIntersection,
    /// `E` differs by a lattice vector from half the sum of `count`
    /// disjoint smooth rational curves; such a half-sum is excluded when
    /// `count` is not 0, 8 or 16 (not formalized here).
    DisjointCurves { count: usize },
    /// Even and not reducible to disjoint curves by this check.
    Undecided,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfSumCandidate {
    pub members: Vec<DivisorLabel>,
    #[serde(serialize_with = "crate::serialize_rational")]
    pub self_intersection: BigRational,
    pub verdict: HalfSumVerdict,
    /// For even candidates: the classes whose half-sum remains after
    /// subtracting a lattice vector.
    pub residual_curves: Vec<DivisorLabel>,
}

/// All `E = 1/2 sum a_i S_i` (`a_i` in `{0, 1}`, not all zero) pairing
/// integrally with the basis.
pub fn sublattice_index_check(l: &PicardLattice) -> Result<Vec<HalfSumCandidate>, LatticeError> {
    let n = l.rank();
    assert!(n <= 32);
    // rows of the Gram matrix mod 2 as bit masks
    let masks: Vec<u32> = (0..n).map(|i| (0..n).filter(|&j| l.gram.get(i, j).is_odd()).fold(0u32, |m, j| m | (1 << j))).collect();
    let mut out = Vec::new();
    for bits in 1u32..(1 << n) {
        if masks.iter().any(|m| (m & bits).count_ones() % 2 == 1) {
            continue;
        }
        let a: Vec<i64> = (0..n).map(|i| i64::from(bits >> i & 1)).collect();
        let e2 = BigRational::new(l.pair(&a, &a), BigInt::from(4));
        let members: Vec<DivisorLabel> = (0..n).filter(|&i| a[i] == 1).map(|i| l.basis[i]).collect();
        let (verdict, residual_curves) = if !e2.is_integer() || e2.to_integer().is_odd() {
            (HalfSumVerdict::OddSelfIntersection, vec![])
        } else {
            match disjoint_curve_reduction(l, &a) {
                Some(curves) => (HalfSumVerdict::DisjointCurves { count: curves.len() }, curves),
                None => (HalfSumVerdict::Undecided, vec![]),
            }
        };
        out.push(HalfSumCandidate { members, self_intersection: e2, verdict, residual_curves });
    }
    Ok(out)
}

trait IsOdd {
    fn is_odd(&self) -> bool;
}

impl IsOdd for BigInt {
    fn is_odd(&self) -> bool {
        num_integer::Integer::is_odd(self)
    }
}

/// Look for a set of pairwise disjoint `(-2)`-curves whose sum is congruent
/// to `a` modulo twice the lattice.
fn disjoint_curve_reduction(l: &PicardLattice, a: &[i64]) -> Option<Vec<DivisorLabel>> {
    let curves: Vec<DivisorLabel> = DivisorLabel::catalogue().into_iter().filter(|c| matches!(c, DivisorLabel::Line { .. } | DivisorLabel::Conic { .. })).collect();
    let target: Vec<i64> = a.iter().map(|x| x.rem_euclid(2)).collect();
    // search by increasing size up to four curves
    fn rec(l: &PicardLattice, curves: &[DivisorLabel], start: usize, chosen: &mut Vec<DivisorLabel>, target: &[i64], depth: usize) -> bool {
        let sum: Vec<i64> = (0..l.rank()).map(|i| chosen.iter().map(|c| l.expansions[c][i]).sum::<i64>().rem_euclid(2)).collect();
        if !chosen.is_empty() && sum == target {
            return true;
        }
        if chosen.len() == depth {
            return false;
        }
        for k in start..curves.len() {
            let c = curves[k];
            if chosen.iter().all(|d| geometric_pairing(*d, c) == 0) {
                chosen.push(c);
                if rec(l, curves, k + 1, chosen, target, depth) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    for depth in 1..=4 {
        let mut chosen = Vec::new();
        if rec(l, &curves, 0, &mut chosen, &target, depth) {
            return Some(chosen);
        }
    }
    None
}

/// Determinant of the Gram matrix of the fibration basis, and the index of
/// its span in the standard lattice.
pub fn fibration_basis_check(l: &PicardLattice) -> Result<(BigInt, BigInt), LatticeError> {
    let fb = fibration_basis();
    let det = l.gram_of(&fb).det()?;
    let index = l.expansion_matrix(&fb)?.det()?.abs();
    Ok((det, index))
}

/// Everything reported by `picard --verify`.
#[derive(Debug, Clone, Serialize)]
pub struct PicardVerification {
    #[serde(serialize_with = "ser_big")]
    pub determinant: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub fibration_determinant: BigInt,
    #[serde(serialize_with = "ser_big")]
    pub fibration_index: BigInt,
    pub signature: (usize, usize),
    pub even: bool,
    pub symmetric: bool,
    pub expansions_consistent: bool,
    pub quotient_by_fibers: QuotientDescription,
    pub involutions: Vec<InvolutionCheck>,
    pub cohomology: CohomologySummary,
    pub half_sums: Vec<HalfSumCandidate>,
    pub discrepancies: DiscrepancyReport,
}

fn ser_big<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

pub fn verify_picard() -> Result<PicardVerification, LatticeError> {
    let l = build_lattice()?;
    let action = GroupAction::on_picard(&l)?;
    let (pos, neg, _) = l.gram.signature()?;
    let (fdet, findex) = fibration_basis_check(&l)?;
    Ok(PicardVerification {
        determinant: l.gram.det()?,
        fibration_determinant: fdet,
        fibration_index: findex,
        signature: (pos, neg),
        even: (0..l.rank()).all(|i| num_integer::Integer::is_even(l.gram.get(i, i))),
        symmetric: l.gram.is_symmetric(),
        expansions_consistent: l.expansions_consistent(),
        quotient_by_fibers: quotient_by_fibers(&l)?,
        involutions: involution_isometry_check(),
        cohomology: cohomology_summary(&l, &action)?,
        half_sums: sublattice_index_check(&l)?,
        discrepancies: discrepancy_report(&l, &action)?,
    })
}

/// Named matrices for the plain-text dump.
pub fn matrix_dump(l: &PicardLattice, action: &GroupAction) -> Vec<(String, IntMatrix)> {
    let mut out = vec![("gram".to_string(), l.gram.clone())];
    for g in Generator::ALL {
        let m = match g {
            Generator::Sigma => &action.sigma,
            Generator::Tau => &action.tau,
            Generator::Rho => &action.rho,
        };
        out.push((g.name().to_string(), m.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for l in DivisorLabel::catalogue() {
            assert_eq!(l.to_string().parse::<DivisorLabel>().unwrap(), l);
        }
        assert_eq!(DivisorLabel::catalogue().len(), 45);
        assert!("l11++".parse::<DivisorLabel>().is_err());
        assert!("E1".parse::<DivisorLabel>().is_err());
        // l21^{-+} is lbar12^{+-}
        assert_eq!("l21-+".parse::<DivisorLabel>().unwrap().to_string(), "lbar12+-");
    }

    #[test]
    fn nodal_fibers_have_fiber_class() {
        let l = build_lattice().unwrap();
        for i in 1..=3 {
            assert_eq!(l.expand_str(&format!("A{i}")).unwrap(), l.expand_str(&format!("D{i}")).unwrap());
            assert_eq!(l.expand_str(&format!("B{i}")).unwrap(), l.expand_str(&format!("D{i}")).unwrap());
        }
    }

    #[test]
    fn fiber_pairings() {
        let l = build_lattice().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.gram.get(i, j), &BigInt::from(if i == j { 0 } else { 2 }));
            }
        }
    }

    #[test]
    fn generators_permute_the_catalogue() {
        let cat = DivisorLabel::catalogue();
        for g in Generator::ALL {
            let mut img: Vec<DivisorLabel> = cat.iter().map(|l| g.apply(*l)).collect();
            img.sort();
            let mut c = cat.clone();
            c.sort();
            assert_eq!(img, c);
        }
    }

    #[test]
    fn identity_is_an_isometry() {
        let c = check_involution("identity", &IntMatrix::identity(3));
        assert!(c.isometry && c.involutive);
    }
}
