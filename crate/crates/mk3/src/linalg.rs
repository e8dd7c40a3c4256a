//! Exact linear algebra over the integers.
//!
//! Smith normal form (with both unimodular transforms and their inverses) is
//! the engine behind kernels, images, quotients and cohomology groups. Every
//! transform is tracked exactly so results can be re-verified by matrix
//! multiplication.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("matrix is not square")]
    NotSquare,
    #[error("system has no integral solution")]
    NoIntegralSolution,
    #[error("malformed matrix text: {0}")]
    Parse(String),
}

/// Dense integer matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rows of space-separated integers, one row per line.
impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl FromStr for IntMatrix {
    type Err = LinalgError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut rows = Vec::new();
        for line in s.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let row: Result<Vec<BigInt>, _> = line.split_whitespace().map(BigInt::from_str).collect();
            rows.push(row.map_err(|e| LinalgError::Parse(e.to_string()))?);
        }
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LinalgError::Parse("ragged rows".into()));
        }
        Ok(IntMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() })
    }
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> BigInt) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        IntMatrix { rows, cols, data }
    }

    /// Build from rows of machine integers. Panics on ragged input.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        assert!(rows.iter().all(|r| r.as_ref().len() == cols), "ragged rows");
        IntMatrix { rows: rows.len(), cols, data: rows.iter().flat_map(|r| r.as_ref().iter().map(|&v| BigInt::from(v))).collect() }
    }

    /// A single column.
    pub fn column_vector(v: &[BigInt]) -> Self {
        IntMatrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    /// Entries as `i64`, if they all fit.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows).map(|i| self.row(i).iter().map(|v| v.to_i64()).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "product of {}x{} and {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(l, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Self::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(self.rows)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn hstack(parts: &[&IntMatrix]) -> Result<Self, LinalgError> {
        let rows = parts.first().map_or(0, |m| m.rows);
        if parts.iter().any(|m| m.rows != rows) {
            return Err(LinalgError::Shape("hstack with unequal row counts".into()));
        }
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut c0 = 0;
        for m in parts {
            for i in 0..rows {
                for j in 0..m.cols {
                    out.set(i, c0 + j, m.get(i, j).clone());
                }
            }
            c0 += m.cols;
        }
        Ok(out)
    }

    pub fn vstack(parts: &[&IntMatrix]) -> Result<Self, LinalgError> {
        let cols = parts.first().map_or(0, |m| m.cols);
        if parts.iter().any(|m| m.cols != cols) {
            return Err(LinalgError::Shape("vstack with unequal column counts".into()));
        }
        let rows = parts.iter().map(|m| m.rows).sum();
        let data = parts.iter().flat_map(|m| m.data.iter().cloned()).collect();
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows.start + i, cols.start + j).clone())
    }

    /// Columns with the given indices, in order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| self.row(i).to_vec()).collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        self.smith().rank()
    }

    /// Characteristic polynomial `det(t I - A)`, coefficients from the
    /// constant term upward, by the Faddeev-LeVerrier recursion.
    pub fn charpoly(&self) -> Result<Vec<BigInt>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[n] = BigInt::one();
        let mut m = Self::zeros(n, n);
        let id = Self::identity(n);
        for k in 1..=n {
            m = self.mul(&m).add(&id.scale(&coeffs[n - k + 1]));
            let t = self.mul(&m).trace();
            let (q, r) = (-t).div_rem(&BigInt::from(k));
            debug_assert!(r.is_zero(), "Faddeev-LeVerrier division is exact over Z");
            coeffs[n - k] = q;
        }
        Ok(coeffs)
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix, counted by
    /// Descartes' rule on the characteristic polynomial (exact because every
    /// root is real).
    pub fn signature(&self) -> Result<(usize, usize, usize), LinalgError> {
        if !self.is_symmetric() {
            return Err(LinalgError::Shape("signature of a non-symmetric matrix".into()));
        }
        let c = self.charpoly()?;
        let zero = c.iter().take_while(|v| v.is_zero()).count();
        let variations = |signs: Vec<bool>| signs.windows(2).filter(|w| w[0] != w[1]).count();
        let pos = variations(c.iter().filter(|v| !v.is_zero()).map(|v| v.is_positive()).collect());
        let neg = variations(c.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| v.is_positive() ^ (i % 2 == 1)).collect());
        Ok((pos, neg, zero))
    }

    fn row_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(src, j) * c;
            self.data[dst * self.cols + j] += v;
        }
    }

    fn col_add(&mut self, dst: usize, src: usize, c: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, src) * c;
            self.data[i * self.cols + dst] += v;
        }
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn col_swap(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn row_neg(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.data[a * self.cols + j]);
            self.data[a * self.cols + j] = v;
        }
    }

    fn col_neg(&mut self, a: usize) {
        for i in 0..self.rows {
            let v = -std::mem::take(&mut self.data[i * self.cols + a]);
            self.data[i * self.cols + a] = v;
        }
    }

    /// Smith normal form `U A V = D` with `D` diagonal, `d_1 | d_2 | ...`,
    /// all entries nonnegative.
    pub fn smith(&self) -> Smith {
        let (m, n) = (self.rows, self.cols);
        let mut s = Smith { d: self.clone(), u: Self::identity(m), u_inv: Self::identity(m), v: Self::identity(n), v_inv: Self::identity(n) };
        let mut t = 0;
        while t < m.min(n) {
            // Pivot: smallest nonzero entry of the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let e = s.d.get(i, j);
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < s.d.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..m {
                    if s.d.get(i, t).is_zero() {
                        continue;
                    }
                    let q = s.d.get(i, t).div_floor(s.d.get(t, t));
                    s.add_row(i, t, &-q);
                    if !s.d.get(i, t).is_zero() {
                        clean = false;
                    }
                }
                for j in t + 1..n {
                    if s.d.get(t, j).is_zero() {
                        continue;
                    }
                    let q = s.d.get(t, j).div_floor(s.d.get(t, t));
                    s.add_col(j, t, &-q);
                    if !s.d.get(t, j).is_zero() {
                        clean = false;
                    }
                }
                if clean {
                    // Divisibility: fold any offending row into row t.
                    let p = s.d.get(t, t).clone();
                    let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.d.get(i, j).is_multiple_of(&p)));
                    match bad {
                        Some(i) => s.add_row(t, i, &BigInt::one()),
                        None => break,
                    }
                }
                // Restore the smallest entry of row t and column t as pivot.
                let mut best = (t, t);
                for i in t + 1..m {
                    if !s.d.get(i, t).is_zero() && s.d.get(i, t).abs() < s.d.get(best.0, best.1).abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !s.d.get(t, j).is_zero() && s.d.get(t, j).abs() < s.d.get(best.0, best.1).abs() {
                        best = (t, j);
                    }
                }
                s.swap_rows(t, best.0);
                s.swap_cols(t, best.1);
            }
            if s.d.get(t, t).is_negative() {
                s.neg_row(t);
            }
            t += 1;
        }
        s
    }

    /// Saturated basis (as columns) of the integer kernel `{x : A x = 0}`.
    pub fn kernel(&self) -> IntMatrix {
        let s = self.smith();
        let r = s.rank();
        s.v.submatrix(0..self.cols, r..self.cols)
    }

    /// Integer solution `X` of `self * X = rhs`, when `self` has full column rank.
    pub fn solve(&self, rhs: &IntMatrix) -> Result<IntMatrix, LinalgError> {
        if rhs.rows != self.rows {
            return Err(LinalgError::Shape("right-hand side row count".into()));
        }
        let s = self.smith();
        let r = s.rank();
        if r < self.cols {
            return Err(LinalgError::Shape("coefficient matrix is not of full column rank".into()));
        }
        // D (V^-1 X) = U rhs
        let y = s.u.mul(rhs);
        let mut w = IntMatrix::zeros(self.cols, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let e = y.get(i, j);
                if i < r {
                    let (q, rem) = e.div_rem(s.d.get(i, i));
                    if !rem.is_zero() {
                        return Err(LinalgError::NoIntegralSolution);
                    }
                    w.set(i, j, q);
                } else if !e.is_zero() {
                    return Err(LinalgError::NoIntegralSolution);
                }
            }
        }
        Ok(s.v.mul(&w))
    }

    /// Exact rational inverse of a nonsingular square matrix.
    pub fn inverse_rational(&self) -> Result<Vec<Vec<BigRational>>, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let n = self.rows;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                let mut row: Vec<BigRational> = self.row(i).iter().map(|v| BigRational::from_integer(v.clone())).collect();
                row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(LinalgError::Shape("singular matrix".into()))?;
            a.swap(c, p);
            let inv = a[c][c].recip();
            for v in a[c].iter_mut() {
                *v *= &inv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..2 * n {
                        let t = &a[c][j] * &f;
                        a[i][j] -= t;
                    }
                }
            }
        }
        Ok(a.into_iter().map(|row| row[n..].to_vec()).collect())
    }
}

/// `U A V = D` with unimodular `U`, `V`.
#[derive(Debug, Clone)]
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
}

impl Smith {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.row_swap(a, b);
        self.u.row_swap(a, b);
        self.u_inv.col_swap(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.col_swap(a, b);
        self.v.col_swap(a, b);
        self.v_inv.row_swap(a, b);
    }

    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.row_add(dst, src, c);
        self.u.row_add(dst, src, c);
        self.u_inv.col_add(src, dst, &-c);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &BigInt) {
        self.d.col_add(dst, src, c);
        self.v.col_add(dst, src, c);
        self.v_inv.row_add(src, dst, &-c);
    }

    fn neg_row(&mut self, a: usize) {
        self.d.row_neg(a);
        self.u.row_neg(a);
        self.u_inv.col_neg(a);
    }

    /// Diagonal entries, including trailing zeros up to `min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols)).map(|i| self.d.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|v| !v.is_zero()).count()
    }

    /// Nonzero diagonal entries greater than one.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.diagonal().into_iter().filter(|v| !v.is_zero() && !v.is_one()).collect()
    }
}

/// A finitely generated abelian group `Z^free + sum Z/d_i`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AbelianGroup {
    /// Invariant factors greater than one, forming a divisibility chain.
    pub factors: Vec<u64>,
    pub free_rank: usize,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { factors: vec![], free_rank: 0 }
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty() && self.free_rank == 0
    }

    pub fn order(&self) -> Option<u64> {
        (self.free_rank == 0).then(|| self.factors.iter().product())
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        if self.free_rank > 0 {
            parts.push(format!("Z^{}", self.free_rank));
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

/// `ker(relations) / image(boundary)` where the columns of `boundary` lie in
/// the kernel of `relations`.
pub fn kernel_quotient(relations: &IntMatrix, boundary: &IntMatrix) -> Result<AbelianGroup, LinalgError> {
    if relations.cols != boundary.rows {
        return Err(LinalgError::Shape("boundary does not land in the relation domain".into()));
    }
    let s = relations.smith();
    let r = s.rank();
    let coords = s.v_inv.mul(boundary);
    if !coords.submatrix(0..r, 0..coords.cols).is_zero() {
        return Err(LinalgError::Shape("boundary leaves the kernel".into()));
    }
    let x = coords.submatrix(r..relations.cols, 0..coords.cols);
    let sx = x.smith();
    let factors = sx.torsion().iter().map(|v| v.to_u64().expect("invariant factor fits in u64")).collect();
    Ok(AbelianGroup { factors, free_rank: (relations.cols - r) - sx.rank() })
}

/// Coordinates of the quotient `Z^n / span(sub)` when it is torsion-free:
/// returns `(P, L)` with `P` (of size `(n - r) x n`) projecting onto the
/// quotient and `L` (of size `n x (n - r)`) a section of it.
pub fn quotient_coordinates(sub: &IntMatrix) -> Result<(IntMatrix, IntMatrix, Vec<BigInt>), LinalgError> {
    let s = sub.smith();
    let r = s.rank();
    let n = sub.rows;
    let proj = s.u.submatrix(r..n, 0..n);
    let lift = s.u_inv.submatrix(0..n, r..n);
    Ok((proj, lift, s.torsion()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn smith_of_small_matrix() {
        let a = m(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = a.smith();
        assert_eq!(s.diagonal(), vec![2.into(), 6.into(), 12.into()]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
        assert!(s.u.mul(&s.u_inv).is_identity());
        assert!(s.v.mul(&s.v_inv).is_identity());
    }

    #[test]
    fn determinant_and_charpoly() {
        let a = m(&[&[0, 2, 2], &[2, 0, 2], &[2, 2, 0]]);
        assert_eq!(a.det().unwrap(), 16.into());
        // eigenvalues 4, -2, -2
        let c = a.charpoly().unwrap();
        assert_eq!(c, vec![(-16).into(), (-12).into(), 0.into(), 1.into()]);
        assert_eq!(a.signature().unwrap(), (1, 2, 0));
    }

    #[test]
    fn kernel_is_saturated() {
        let a = m(&[&[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.cols(), 2);
        assert!(a.mul(&k).is_zero());
        // a saturated basis extends to a unimodular matrix: gcd of 2x2 minors is 1
        let minors: Vec<BigInt> = [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(i, j)| k.get(i, 0) * k.get(j, 1) - k.get(j, 0) * k.get(i, 1))
            .collect();
        let g = minors.iter().fold(BigInt::zero(), |g, v| g.gcd(v));
        assert!(g.is_one());
    }

    #[test]
    fn quotient_of_multiplication_by_n() {
        // ker(0) / 3 Z^2 = (Z/3)^2
        let g = kernel_quotient(&IntMatrix::zeros(1, 2), &IntMatrix::identity(2).scale(&3.into())).unwrap();
        assert_eq!(g, AbelianGroup { factors: vec![3, 3], free_rank: 0 });
    }

    #[test]
    fn solve_and_text_round_trip() {
        let a = m(&[&[1, 0], &[1, 1], &[0, 2]]);
        let x = m(&[&[3], &[-2]]);
        let b = a.mul(&x);
        assert_eq!(a.solve(&b).unwrap(), x);
        assert_eq!(a.solve(&m(&[&[1], &[0], &[1]])), Err(LinalgError::NoIntegralSolution));
        let text = a.to_string();
        assert_eq!(text.parse::<IntMatrix>().unwrap(), a);
    }

    #[test]
    fn singular_determinant() {
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det().unwrap(), BigInt::zero());
        assert_eq!(IntMatrix::identity(0).det().unwrap(), BigInt::one());
    }
}
