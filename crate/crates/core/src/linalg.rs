//! Exact sparse linear algebra over the rationals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::bail;
use crate::Result;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Sparse vector: index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Q>;

/// `acc += c * v`, dropping cancelled entries.
pub fn axpy(acc: &mut SparseVec, c: &Q, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let prod = c * x;
        match acc.get_mut(&i) {
            Some(e) => {
                *e += prod;
                if e.is_zero() {
                    acc.remove(&i);
                }
            }
            None => {
                acc.insert(i, prod);
            }
        }
    }
}

pub fn scaled(v: &SparseVec, c: &Q) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

/// Column-major sparse matrix: `cols[j]` is the image of the `j`-th basis vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, columns: alloc::vec![SparseVec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.columns[i].insert(i, Q::one());
        }
        m
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVec>) -> Self {
        SparseMatrix { rows, cols: columns.len(), columns }
    }

    /// From a row-major dense table.
    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let mut out = alloc::vec![alloc::vec![Q::zero(); self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for (&i, x) in col {
                out[i][j] = x.clone();
            }
        }
        out
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.columns[j].get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: Q) {
        if x.is_zero() {
            self.columns[j].remove(&i);
        } else {
            self.columns[j].insert(i, x);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, x: &Q) {
        let mut v = SparseVec::new();
        v.insert(i, Q::one());
        axpy(&mut self.columns[j], x, &v);
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&j, x) in v {
            axpy(&mut out, x, &self.columns[j]);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            bail!(InvalidArgument, "cannot compose {}x{} with {}x{}", self.rows, self.cols, other.rows, other.cols);
        }
        Ok(SparseMatrix::from_columns(self.rows, other.columns.iter().map(|c| self.apply(c)).collect()))
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.lin_comb(&Q::one(), other)
    }

    /// `self + c · other`.
    pub fn lin_comb(&self, c: &Q, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            bail!(InvalidArgument, "shape mismatch");
        }
        let mut out = self.clone();
        for (j, col) in other.columns.iter().enumerate() {
            axpy(&mut out.columns[j], c, col);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> SparseMatrix {
        SparseMatrix::from_columns(self.rows, self.columns.iter().map(|col| scaled(col, c)).collect())
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut out = SparseMatrix::zeros(self.cols, self.rows);
        for (j, col) in self.columns.iter().enumerate() {
            for (&i, x) in col {
                out.columns[i].insert(j, x.clone());
            }
        }
        out
    }

    /// Rows as sparse vectors indexed by column.
    pub fn row_vectors(&self) -> Vec<SparseVec> {
        self.transpose().columns
    }

    /// Whether every column has exactly one entry, equal to ±1, and distinct columns
    /// hit distinct rows.
    pub fn is_signed_permutation(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let mut hit = alloc::vec![false; self.rows];
        for col in &self.columns {
            if col.len() != 1 {
                return false;
            }
            let (&i, x) = col.iter().next().unwrap();
            if hit[i] || !(x.abs().is_one()) {
                return false;
            }
            hit[i] = true;
        }
        true
    }

    /// Stack several matrices with the same column count.
    pub fn vstack(parts: &[SparseMatrix]) -> Result<SparseMatrix> {
        let cols = parts.first().map_or(0, |p| p.cols);
        let mut out = SparseMatrix::zeros(0, cols);
        for p in parts {
            if p.cols != cols {
                bail!(InvalidArgument, "column mismatch in vstack");
            }
            for (j, col) in p.columns.iter().enumerate() {
                for (&i, x) in col {
                    out.columns[j].insert(out.rows + i, x.clone());
                }
            }
            out.rows += p.rows;
        }
        Ok(out)
    }
}

/// Row echelon data: pivot column to its normalized row (leading entry 1).
struct Echelon {
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    fn new() -> Self {
        Echelon { pivots: BTreeMap::new() }
    }

    /// Reduces `row` against known pivots; stores it as a new pivot if nonzero.
    fn insert(&mut self, mut row: SparseVec) -> bool {
        loop {
            let Some((&lead, x)) = row.iter().next() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let c = -x.clone();
                    axpy(&mut row, &c, p);
                }
                None => {
                    let inv = x.recip();
                    let row = scaled(&row, &inv);
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Reduced row echelon: clears entries above every pivot.
    fn reduce(&mut self) {
        let cols: Vec<usize> = self.pivots.keys().rev().copied().collect();
        for (idx, &c) in cols.iter().enumerate() {
            let mut row = self.pivots.remove(&c).unwrap();
            // pivots with larger column are already reduced
            for &c2 in cols[..idx].iter() {
                if let Some(x) = row.get(&c2).cloned() {
                    let p = &self.pivots[&c2];
                    axpy(&mut row, &-x, p);
                }
            }
            self.pivots.insert(c, row);
        }
    }
}

/// Rank of `m`.
pub fn rank(m: &SparseMatrix) -> usize {
    let mut ech = Echelon::new();
    let mut r = 0;
    for row in m.row_vectors() {
        if ech.insert(row) {
            r += 1;
        }
    }
    r
}

/// Rank and a kernel basis. The basis is in reduced form: each vector has a
/// distinct free coordinate where it is 1 and every other basis vector is 0.
pub fn rank_kernel(m: &SparseMatrix) -> (usize, Vec<SparseVec>) {
    let mut ech = Echelon::new();
    for row in m.row_vectors() {
        ech.insert(row);
    }
    ech.reduce();
    let rank = ech.pivots.len();
    let mut kernel = Vec::new();
    for f in 0..m.cols {
        if ech.pivots.contains_key(&f) {
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(f, Q::one());
        for (&c, row) in &ech.pivots {
            if let Some(x) = row.get(&f) {
                v.insert(c, -x.clone());
            }
        }
        kernel.push(v);
    }
    (rank, kernel)
}

/// [`rank_kernel`] with columns visited in the order given by `order`
/// (a permutation of `0..cols`); kernel vectors are returned in original coordinates.
pub fn rank_kernel_ordered(m: &SparseMatrix, order: &[usize]) -> Result<(usize, Vec<SparseVec>)> {
    if order.len() != m.cols {
        bail!(InvalidArgument, "order has {} entries for {} columns", order.len(), m.cols);
    }
    let mut cols = alloc::vec![SparseVec::new(); m.cols];
    for (new, &old) in order.iter().enumerate() {
        cols[new] = m.columns[old].clone();
    }
    let permuted = SparseMatrix::from_columns(m.rows, cols);
    let (r, ker) = rank_kernel(&permuted);
    let back = ker
        .into_iter()
        .map(|v| v.into_iter().map(|(i, x)| (order[i], x)).collect())
        .collect();
    Ok((r, back))
}

/// Basis of the column space of `m`, as a subset of its columns (first independent ones).
pub fn column_basis(m: &SparseMatrix) -> Vec<usize> {
    let mut ech = Echelon::new();
    let mut out = Vec::new();
    for (j, col) in m.columns.iter().enumerate() {
        if ech.insert(col.clone()) {
            out.push(j);
        }
    }
    out
}

/// Basis of the span of `vectors` in reduced echelon form with pivot positions.
pub fn reduced_span(vectors: &[SparseVec]) -> Vec<(usize, SparseVec)> {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v.clone());
    }
    ech.reduce();
    ech.pivots.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_and_kernel() {
        let m = SparseMatrix::from_dense(&[
            alloc::vec![q(1), q(2), q(3)],
            alloc::vec![q(2), q(4), q(6)],
            alloc::vec![q(0), q(1), q(1)],
        ]);
        let (r, ker) = rank_kernel(&m);
        assert_eq!(r, 2);
        assert_eq!(ker.len(), 1);
        assert!(m.apply(&ker[0]).is_empty());
        let (r2, ker2) = rank_kernel_ordered(&m, &[2, 0, 1]).unwrap();
        assert_eq!(r2, 2);
        assert!(m.apply(&ker2[0]).is_empty());
    }

    #[test]
    fn fractions_are_exact() {
        let m = SparseMatrix::from_dense(&[alloc::vec![q_frac(1, 3), q_frac(1, 6)]]);
        let (_, ker) = rank_kernel(&m);
        assert_eq!(ker[0].get(&0), Some(&q_frac(-1, 2)));
    }
}
