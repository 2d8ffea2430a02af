//! Exact integer and rational linear algebra.
//!
//! Everything in this module works over arbitrary-precision integers and
//! rationals. Determinants and ranks use fraction-free (Bareiss) elimination
//! so intermediate entries stay bounded by minors of the input.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("not positive definite: pivot {index} is {pivot}")]
    NotPositiveDefinite { index: usize, pivot: BigRational },
    #[error("generated group has rank {rank}, expected full rank {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Dense row-major matrix of arbitrary-precision integers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must equal rows*cols");
        IntMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix::new(rows, cols, vec![BigInt::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        IntMatrix::new(rows, cols, entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(r.iter().map(|&x| BigInt::from(x)));
        }
        IntMatrix::new(rows.len(), cols, entries)
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

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Block-diagonal sum `diag(self, other)`.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }

    /// Converts to machine integers, or `None` if any entry overflows `i64`.
    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.to_i64()).collect())
            .collect()
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        )
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// Dense row-major matrix of exact rationals. `BigRational` keeps every
/// entry reduced with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigRational>) -> Self {
        assert_eq!(rows * cols, entries.len(), "entry count must equal rows*cols");
        RatMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix::new(rows, cols, vec![BigRational::zero(); rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix::identity(n).to_rational()
    }

    /// Builds a matrix from rows of `(numerator, denominator)` pairs.
    pub fn from_fractions<R: AsRef<[(i64, i64)]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            entries.extend(
                r.iter().map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))),
            );
        }
        RatMatrix::new(rows.len(), cols, entries)
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let entries: Vec<BigRational> = rows.into_iter().flatten().collect();
        RatMatrix::new(n, cols, entries)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != other.rows {
            return Err(ExactError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = RatMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.entries[idx] += a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Least common multiple of all entry denominators (1 for the empty matrix).
    pub fn common_denominator(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Returns the integer matrix `self * d`, or `None` if it is not integral.
    pub fn scaled_to_integer(&self, d: &BigInt) -> Option<IntMatrix> {
        let scale = BigRational::from_integer(d.clone());
        let mut out = Vec::with_capacity(self.entries.len());
        for x in &self.entries {
            let y = x * &scale;
            if !y.is_integer() {
                return None;
            }
            out.push(y.to_integer());
        }
        Some(IntMatrix::new(self.rows, self.cols, out))
    }

    /// Returns the integer matrix with the same entries, if all are integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        self.scaled_to_integer(&BigInt::one())
    }

    pub fn block_diag(&self, other: &RatMatrix) -> RatMatrix {
        let mut out = RatMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).clone());
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j).clone());
            }
        }
        out
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn det_exact(m: &IntMatrix) -> Result<BigInt, ExactError> {
    if !m.is_square() {
        return Err(ExactError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a: Vec<Vec<BigInt>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                // Sylvester's identity guarantees exact division.
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// Exact rank by fraction-free elimination. Works for any shape.
pub fn rank_exact(m: &IntMatrix) -> usize {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows).map(|i| m.row(i).to_vec()).collect();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[i][j] * &a[rank][col] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Exact inverse of a square rational matrix by Gauss–Jordan elimination.
pub fn inverse_rational(m: &RatMatrix) -> Result<RatMatrix, ExactError> {
    if m.rows() != m.cols() {
        return Err(ExactError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut inv: Vec<Vec<BigRational>> = (0..n).map(|i| RatMatrix::identity(n).row(i).to_vec()).collect();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Err(ExactError::RankDeficient { rank: col, expected: n });
        };
        a.swap(col, p);
        inv.swap(col, p);
        let piv = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &piv;
            inv[col][j] = &inv[col][j] / &piv;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let v = &a[r][j] - &f * &a[col][j];
                a[r][j] = v;
                let w = &inv[r][j] - &f * &inv[col][j];
                inv[r][j] = w;
            }
        }
    }
    Ok(RatMatrix::from_rows(inv))
}

/// Rational `G = Uᵀ · diag(D) · U` factorization with `U` unit upper triangular.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ldl {
    pub d: Vec<BigRational>,
    pub u: RatMatrix,
}

impl Ldl {
    /// Recomputes `Uᵀ · D · U`.
    pub fn reconstruct(&self) -> RatMatrix {
        let n = self.d.len();
        let mut du = self.u.clone();
        for i in 0..n {
            for j in 0..n {
                let v = self.u.get(i, j) * &self.d[i];
                du.set(i, j, v);
            }
        }
        self.u.transpose().mul(&du).expect("square factors")
    }
}

/// Exact LDL factorization of a symmetric rational matrix.
///
/// Fails with the index of the first non-positive pivot, so success is
/// equivalent to positive definiteness.
pub fn ldl_rational(g: &RatMatrix) -> Result<Ldl, ExactError> {
    if g.rows() != g.cols() {
        return Err(ExactError::NotSquare { rows: g.rows(), cols: g.cols() });
    }
    if !g.is_symmetric() {
        return Err(ExactError::NotSymmetric);
    }
    let n = g.rows();
    let mut a = g.clone();
    let mut d = Vec::with_capacity(n);
    let mut u = RatMatrix::identity(n);
    for k in 0..n {
        let p = a.get(k, k).clone();
        if !p.is_positive() {
            return Err(ExactError::NotPositiveDefinite { index: k, pivot: p });
        }
        for j in k + 1..n {
            u.set(k, j, a.get(k, j) / &p);
        }
        for i in k + 1..n {
            let f = u.get(k, i).clone();
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = a.get(i, j) - &f * a.get(k, j);
                a.set(i, j, v);
            }
        }
        d.push(p);
    }
    Ok(Ldl { d, u })
}

/// Positive semidefiniteness of a symmetric integer matrix.
///
/// Symmetric elimination where a zero pivot is only admissible if the rest of
/// its row is zero as well.
pub fn is_positive_semidefinite(m: &IntMatrix) -> bool {
    if !m.is_symmetric() {
        return false;
    }
    let n = m.rows();
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| m.row(i).iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_negative() {
            return false;
        }
        if p.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        for i in k + 1..n {
            let f = &a[i][k] / &p;
            if f.is_zero() {
                continue;
            }
            for j in k + 1..n {
                let v = &a[i][j] - &f * &a[k][j];
                a[i][j] = v;
            }
        }
    }
    true
}

/// A lattice basis in echelon (Hermite) form: the basis vectors are the rows
/// of `rows` divided by `denominator`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnfBasis {
    pub rows: IntMatrix,
    pub denominator: BigInt,
}

impl HnfBasis {
    /// Basis vectors as rationals.
    pub fn to_rational(&self) -> RatMatrix {
        let d = BigRational::from_integer(self.denominator.clone());
        let r = self.rows.to_rational();
        let entries = r.entries.iter().map(|x| x / &d).collect();
        RatMatrix::new(r.rows, r.cols, entries)
    }

    /// Integer coordinates of `v` in this basis, or `None` if `v` is not in
    /// the lattice.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        let n = self.rows.rows();
        if v.len() != self.rows.cols() {
            return None;
        }
        let d = BigRational::from_integer(self.denominator.clone());
        let w: Vec<BigRational> = v.iter().map(|x| x * &d).collect();
        if w.iter().any(|x| !x.is_integer()) {
            return None;
        }
        let w: Vec<BigInt> = w.into_iter().map(|x| x.to_integer()).collect();
        // rows is upper triangular with positive diagonal: solve c · rows = w.
        let mut c: Vec<BigInt> = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = w[j].clone();
            for (i, ci) in c.iter().enumerate() {
                acc -= ci * self.rows.get(i, j);
            }
            let p = self.rows.get(j, j);
            if !(&acc % p).is_zero() {
                return None;
            }
            c.push(acc / p);
        }
        // Remaining columns must match as well (they do for square bases).
        Some(c)
    }
}

fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// Row-style Hermite normal form of the additive group generated by the rows
/// of `m`.
///
/// Denominators are cleared internally by the common denominator `d`; the
/// returned basis consists of the rows of the result divided by `d`.
pub fn hnf_rowreduce(m: &RatMatrix) -> Result<HnfBasis, ExactError> {
    let d = m.common_denominator();
    let a = m.scaled_to_integer(&d).expect("common denominator clears all entries");
    let cols = a.cols();
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let mut pivot = 0;
    for col in 0..cols {
        if pivot == rows.len() {
            break;
        }
        for r in pivot + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let (g, s, t) = ext_gcd(&rows[pivot][col], &rows[r][col]);
            let p_over = &rows[pivot][col] / &g;
            let r_over = &rows[r][col] / &g;
            let new_p: Vec<BigInt> = rows[pivot]
                .iter()
                .zip(&rows[r])
                .map(|(x, y)| &s * x + &t * y)
                .collect();
            let new_r: Vec<BigInt> = rows[pivot]
                .iter()
                .zip(&rows[r])
                .map(|(x, y)| &p_over * y - &r_over * x)
                .collect();
            rows[pivot] = new_p;
            rows[r] = new_r;
        }
        if rows[pivot][col].is_zero() {
            continue;
        }
        if rows[pivot][col].is_negative() {
            for x in rows[pivot].iter_mut() {
                *x = -x.clone();
            }
        }
        let p = rows[pivot][col].clone();
        for r in 0..pivot {
            let q = rows[r][col].div_floor(&p);
            if q.is_zero() {
                continue;
            }
            let (head, tail) = rows.split_at_mut(pivot);
            for (x, y) in head[r].iter_mut().zip(&tail[0]) {
                *x -= &q * y;
            }
        }
        pivot += 1;
    }
    if pivot < cols {
        return Err(ExactError::RankDeficient { rank: pivot, expected: cols });
    }
    rows.truncate(cols);
    let entries = rows.into_iter().flatten().collect();
    Ok(HnfBasis { rows: IntMatrix::new(cols, cols, entries), denominator: d })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor_det(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                    .collect();
                let sign = if c % 2 == 0 { 1 } else { -1 };
                sign * m[0][c] * cofactor_det(&minor)
            })
            .sum()
    }

    fn a_n(n: usize) -> Vec<Vec<i64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match i.abs_diff(j) {
                        0 => 2,
                        1 => -1,
                        _ => 0,
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(det_exact(&IntMatrix::from_rows(&[[2]])).unwrap(), BigInt::from(2));
        let a4 = a_n(4);
        assert_eq!(cofactor_det(&a4), 5);
        assert_eq!(det_exact(&IntMatrix::from_rows(&a4)).unwrap(), BigInt::from(5));
        assert_eq!(det_exact(&IntMatrix::zeros(0, 0)).unwrap(), BigInt::one());
    }

    #[test]
    fn det_needs_pivoting() {
        let m = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        assert_eq!(det_exact(&m).unwrap(), BigInt::from(-1));
        let s = IntMatrix::from_rows(&[[1, 2], [2, 4]]);
        assert_eq!(det_exact(&s).unwrap(), BigInt::zero());
    }

    #[test]
    fn det_rejects_rectangular() {
        let m = IntMatrix::zeros(2, 3);
        assert_eq!(det_exact(&m), Err(ExactError::NotSquare { rows: 2, cols: 3 }));
    }

    #[test]
    fn ldl_two_by_two() {
        let g = RatMatrix::from_fractions(&[[(2, 1), (1, 1)], [(1, 1), (2, 1)]]);
        let f = ldl_rational(&g).unwrap();
        assert_eq!(f.d, vec![BigRational::from_integer(2.into()), BigRational::new(3.into(), 2.into())]);
        assert_eq!(f.u.get(0, 1), &BigRational::new(1.into(), 2.into()));
        assert_eq!(f.reconstruct(), g);
    }

    #[test]
    fn ldl_reports_first_bad_pivot() {
        let g = IntMatrix::from_rows(&[[2, 2], [2, 2]]).to_rational();
        match ldl_rational(&g) {
            Err(ExactError::NotPositiveDefinite { index, pivot }) => {
                assert_eq!(index, 1);
                assert!(pivot.is_zero());
            }
            other => panic!("unexpected {other:?}"),
        }
        let asym = RatMatrix::from_fractions(&[[(1, 1), (0, 1)], [(1, 1), (1, 1)]]);
        assert_eq!(ldl_rational(&asym), Err(ExactError::NotSymmetric));
    }

    #[test]
    fn psd_handles_zero_rows() {
        assert!(is_positive_semidefinite(&IntMatrix::from_rows(&[[2, 0], [0, 0]])));
        assert!(!is_positive_semidefinite(&IntMatrix::from_rows(&[[0, 1], [1, 2]])));
        assert!(is_positive_semidefinite(&IntMatrix::from_rows(&[[2, 2], [2, 2]])));
        assert!(!is_positive_semidefinite(&IntMatrix::from_rows(&[[2, 3], [3, 2]])));
    }

    #[test]
    fn hnf_redundant_generator() {
        let m = RatMatrix::from_fractions(&[[(1, 1), (0, 1)], [(0, 1), (1, 1)], [(1, 1), (1, 1)]]);
        let h = hnf_rowreduce(&m).unwrap();
        assert_eq!(h.rows, IntMatrix::identity(2));
        assert_eq!(h.denominator, BigInt::one());
    }

    #[test]
    fn hnf_rank_deficient() {
        let m = RatMatrix::from_fractions(&[[(1, 1), (1, 1)], [(2, 1), (2, 1)]]);
        assert_eq!(hnf_rowreduce(&m), Err(ExactError::RankDeficient { rank: 1, expected: 2 }));
    }

    #[test]
    fn rank_of_dependent_rows() {
        let m = IntMatrix::from_rows(&[[1, 2, 3], [2, 4, 6], [0, 1, 1]]);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_exact(&IntMatrix::zeros(3, 2)), 0);
    }

    proptest::proptest! {
        #[test]
        fn det_matches_cofactor(entries in proptest::collection::vec(-5i64..=5, 16)) {
            let rows: Vec<Vec<i64>> = entries.chunks(4).map(|c| c.to_vec()).collect();
            let expected = cofactor_det(&rows);
            proptest::prop_assert_eq!(det_exact(&IntMatrix::from_rows(&rows)).unwrap(), BigInt::from(expected));
        }

        #[test]
        fn ldl_reconstructs(entries in proptest::collection::vec(-4i64..=4, 9)) {
            // Aᵀ A + I is symmetric positive definite.
            let a = IntMatrix::from_rows(&entries.chunks(3).map(|c| c.to_vec()).collect::<Vec<_>>());
            let mut g = a.transpose().mul(&a).unwrap();
            for i in 0..3 {
                let v = g.get(i, i) + 1;
                g.set(i, i, v);
            }
            let g = g.to_rational();
            let f = ldl_rational(&g).unwrap();
            proptest::prop_assert_eq!(f.reconstruct(), g);
        }
    }
}
