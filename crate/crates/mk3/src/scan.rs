//! Residue scans for polynomial equations `G(x, y, z) = 0` over `Z/p^j`.
//!
//! Roots modulo `p^(j+1)` are lifts of roots modulo `p^j`, so a scan grows a
//! tree from the roots modulo `p`. Nodes whose Newton margin certifies a
//! p-adic lift are handed to a caller-supplied evaluator; nodes that are not
//! yet decided are refined one level deeper.

use rayon::prelude::*;
use std::collections::BTreeMap;

use crate::arith::{mul_mod, val_u64};
use crate::padic::{prime_power, ResidueWitness};
use crate::poly::{ModPoly, Poly, PolyTriple};

/// Default cap on the number of live nodes in a refinement tree.
pub const DEFAULT_NODE_BUDGET: usize = 4_000_000;

struct Level {
    modulus: u64,
    f: ModPoly,
    grad: [ModPoly; 3],
    a: ModPoly,
    c: ModPoly,
}

/// A polynomial of the shape `A(x, y) z^2 + C(x, y)` prepared for residue
/// scans at one prime.
pub struct ResidueScanner {
    p: u64,
    levels: Vec<Level>,
    units: [bool; 3],
}

/// Outcome of a refinement scan.
#[derive(Debug, Clone)]
pub struct TreeScan<T> {
    /// Every value found, with the lexicographically first witness of the
    /// shallowest level at which it appeared.
    pub found: BTreeMap<T, ResidueWitness>,
    /// Nodes still undecided when the scan stopped.
    pub pending: usize,
    /// Deepest level examined.
    pub depth: u32,
    /// Whether the node budget cut the scan short.
    pub truncated: bool,
    /// Number of nodes visited.
    pub visited: usize,
    /// Undecided nodes left after each level, starting at level 1.
    pub open_by_level: Vec<usize>,
}

impl<T> TreeScan<T> {
    /// No undecided node remains, so `found` is the exact set of values.
    pub fn complete(&self) -> bool {
        self.pending == 0 && !self.truncated
    }

    /// Whether no undecided node remained after level `d`.
    pub fn complete_at(&self, d: u32) -> bool {
        let i = (d.max(1) as usize - 1).min(self.open_by_level.len() - 1);
        self.open_by_level[i] == 0 && (d as usize <= self.open_by_level.len() || !self.truncated)
    }

    /// Values found by level `d`.
    pub fn values_at(&self, d: u32) -> Vec<T>
    where
        T: Clone,
    {
        self.found.iter().filter(|(_, w)| w.exponent <= d).map(|(v, _)| v.clone()).collect()
    }
}

impl ResidueScanner {
    /// Prepare `g` (free of `k`, of degree two in `z` with no odd `z` terms)
    /// for scans modulo `p^j`, `j <= max_level`. Coordinates flagged in
    /// `units` are restricted to p-adic units.
    pub fn new(g: &Poly, p: u64, max_level: u32, units: [bool; 3]) -> Self {
        let coeffs = g.coefficients_in(2);
        assert!(coeffs.len() <= 3 && (coeffs.len() < 2 || coeffs[1].is_zero()), "expected A z^2 + C");
        let c = coeffs[0].clone();
        let a = coeffs.get(2).cloned().unwrap_or_else(Poly::zero);
        let triple = PolyTriple::new(g.clone());
        let mut levels = Vec::new();
        for j in 0..=max_level {
            let modulus = prime_power(p, j).expect("modulus fits in a machine word");
            let compiled = triple.compile(modulus.max(1));
            levels.push(Level { modulus, f: compiled.f, grad: compiled.grad, a: a.compile_mod(modulus.max(1)), c: c.compile_mod(modulus.max(1)) });
        }
        ResidueScanner { p, levels, units }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn max_level(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    /// `p^j`.
    pub fn modulus(&self, j: u32) -> u64 {
        self.levels[j as usize].modulus
    }

    /// Value of `G` modulo `p^j`.
    pub fn value(&self, pt: [u64; 3], j: u32) -> u64 {
        self.levels[j as usize].f.eval(pt)
    }

    fn units_ok(&self, pt: &[u64; 3]) -> bool {
        (0..3).all(|i| !self.units[i] || pt[i] % self.p != 0)
    }

    /// Roots `z` modulo `p^j` of `a z^2 + c`, for residues `a, c` modulo `p^j`.
    fn z_roots(&self, a: u64, c: u64, j: u32) -> Vec<u64> {
        let p = self.p;
        let eval = |z: u64, m: u64| (mul_mod(a % m, mul_mod(z, z, m), m) + c % m) % m;
        let mut roots: Vec<u64> = (0..p).filter(|&z| eval(z, p) == 0).collect();
        for i in 1..j {
            let step = self.modulus(i);
            let m = self.modulus(i + 1);
            let mut next = Vec::new();
            for &z in &roots {
                for t in 0..p {
                    let zz = z + t * step;
                    if eval(zz, m) == 0 {
                        next.push(zz);
                    }
                }
            }
            roots = next;
        }
        roots.sort_unstable();
        roots
    }

    /// Newton certificate for a root modulo `p^j`.
    pub fn witness(&self, pt: [u64; 3], j: u32) -> ResidueWitness {
        let lv = &self.levels[j as usize];
        let mut e = j;
        for g in &lv.grad {
            let d = g.eval(pt);
            if d != 0 {
                e = e.min(val_u64(d, self.p));
            }
        }
        let margin = j as i64 - 2 * e as i64;
        ResidueWitness { prime: self.p, exponent: j, point: pt, liftable: e < j && margin >= 1, lift_margin: margin }
    }

    /// All roots modulo `p` respecting the unit restrictions, in lexicographic order.
    pub fn level_one_roots(&self) -> Vec<[u64; 3]> {
        let p = self.p;
        let lv = &self.levels[1];
        let mut out = Vec::new();
        for x in 0..p {
            for y in 0..p {
                let a = lv.a.eval([x, y, 0]);
                let c = lv.c.eval([x, y, 0]);
                for z in self.z_roots(a, c, 1) {
                    let pt = [x, y, z];
                    if self.units_ok(&pt) {
                        out.push(pt);
                    }
                }
            }
        }
        out
    }

    /// Roots modulo `p^(j+1)` lying over a root modulo `p^j`.
    pub fn lifts(&self, node: [u64; 3], j: u32) -> Vec<[u64; 3]> {
        let p = self.p;
        let step = self.modulus(j);
        let lv = &self.levels[j as usize + 1];
        let mut out = Vec::new();
        for s in 0..p {
            for t in 0..p {
                for u in 0..p {
                    let pt = [node[0] + s * step, node[1] + t * step, node[2] + u * step];
                    if lv.f.eval(pt) == 0 {
                        out.push(pt);
                    }
                }
            }
        }
        out
    }

    /// The lexicographically first certified root modulo `p^j`.
    pub fn first_certified(&self, j: u32) -> Option<ResidueWitness> {
        let m = self.modulus(j);
        let lv = &self.levels[j as usize];
        for x in 0..m {
            for y in 0..m {
                let a = lv.a.eval([x, y, 0]);
                let c = lv.c.eval([x, y, 0]);
                for z in self.z_roots(a, c, j) {
                    let pt = [x, y, z];
                    if !self.units_ok(&pt) {
                        continue;
                    }
                    let w = self.witness(pt, j);
                    if w.liftable {
                        return Some(w);
                    }
                }
            }
        }
        None
    }

    /// Refine from the roots modulo `p` down to level `max_depth`, deciding
    /// every certified node with `eval`. A node is expanded further only when
    /// it is uncertified or `eval` returns `None`.
    pub fn explore<T, E>(&self, max_depth: u32, budget: usize, eval: E) -> TreeScan<T>
    where
        T: Ord + Clone + Send,
        E: Fn(&ResidueWitness) -> Option<T> + Sync,
    {
        assert!(max_depth <= self.max_level(), "scanner compiled to level {}", self.max_level());
        let mut frontier = self.level_one_roots();
        let mut found: BTreeMap<T, ResidueWitness> = BTreeMap::new();
        let mut visited = 0usize;
        let mut depth = 1;
        let mut truncated = false;
        let mut open_by_level = Vec::new();
        loop {
            visited += frontier.len();
            let results: Vec<(Option<T>, ResidueWitness)> = frontier
                .par_iter()
                .map(|&pt| {
                    let w = self.witness(pt, depth);
                    if w.liftable {
                        (eval(&w), w)
                    } else {
                        (None, w)
                    }
                })
                .collect();
            let mut open = Vec::new();
            for (v, w) in results {
                match v {
                    Some(v) => {
                        let better = match found.get(&v) {
                            None => true,
                            Some(old) => (old.exponent, old.point) > (w.exponent, w.point),
                        };
                        if better {
                            found.insert(v, w);
                        }
                    }
                    None => open.push(w.point),
                }
            }
            open_by_level.push(open.len());
            if open.is_empty() || depth >= max_depth {
                return TreeScan { found, pending: open.len(), depth, truncated, visited, open_by_level };
            }
            if open.len().saturating_mul((self.p * self.p) as usize) > budget {
                truncated = true;
                return TreeScan { found, pending: open.len(), depth, truncated, visited, open_by_level };
            }
            let j = depth;
            let mut next: Vec<[u64; 3]> = open.par_iter().flat_map_iter(|&pt| self.lifts(pt, j)).collect();
            next.sort_unstable();
            frontier = next;
            depth += 1;
        }
    }
}

/// Lexicographically least image of a residue triple under coordinate
/// permutations and sign changes of an even number of coordinates.
pub fn canonical_residue(pt: [u64; 3], modulus: u64) -> [u64; 3] {
    let neg = |v: u64| (modulus - v % modulus) % modulus;
    let mut best = [u64::MAX; 3];
    for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
        for flips in [[false, false, false], [true, true, false], [true, false, true], [false, true, true]] {
            let img: [u64; 3] = std::array::from_fn(|i| {
                let v = pt[perm[i]] % modulus;
                if flips[i] {
                    neg(v)
                } else {
                    v
                }
            });
            best = best.min(img);
        }
    }
    best
}
