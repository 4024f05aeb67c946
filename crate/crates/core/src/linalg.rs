//! Exact linear algebra over ℚ and ℚ(i).
//!
//! Dense matrices serve the small complex systems (reproducing fields, rank
//! factorizations, chain bookkeeping). [`SparseEchelon`] serves the large real
//! tangency systems: rows are inserted one at a time and only independent rows
//! are kept.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::Scalar;

pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Complex conjugate; identity on ℚ.
    fn conj(&self) -> Self;
}

impl Field for BigRational {
    fn conj(&self) -> Self {
        self.clone()
    }
}

impl Field for Scalar {
    fn conj(&self) -> Self {
        Scalar::conj(self)
    }
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn scalar(c: F, n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &F {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).conj());
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x.clone()).collect() }
    }

    pub fn mul(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out: Matrix<F> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = out.get(i, j).clone() + a.clone() * o.get(k, j).clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| (0..self.cols).fold(F::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone())).collect()
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = F::one() / m.get(r, c).clone();
            for j in c..m.cols {
                let v = m.get(r, j).clone() * inv.clone();
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in c..m.cols {
                    let v = m.get(i, j).clone() - f.clone() * m.get(r, j).clone();
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Basis of `{x : A x = 0}`, one vector per free column (ascending).
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        kernel_from_rref(self.cols, &pivots, |i, j| r.get(i, j).clone())
    }

    /// A solution of `A x = b` with free variables set to zero.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zeros(self.rows, self.cols + 1);
        for (i, bi) in b.iter().enumerate() {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, self.cols, bi.clone());
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = r.get(i, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, F::one());
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j).clone());
            }
        }
        Some(inv)
    }

    /// Rank factorization `A = L · R` with `L` = pivot columns of `A` and `R` = nonzero rows of rref(A).
    pub fn rank_factorization(&self) -> (Matrix<F>, Matrix<F>) {
        let (r, pivots) = self.rref();
        let k = pivots.len();
        let mut left = Matrix::zeros(self.rows, k);
        for (jj, &c) in pivots.iter().enumerate() {
            for i in 0..self.rows {
                left.set(i, jj, self.get(i, c).clone());
            }
        }
        let mut right = Matrix::zeros(k, self.cols);
        for i in 0..k {
            for j in 0..self.cols {
                right.set(i, j, r.get(i, j).clone());
            }
        }
        (left, right)
    }
}

fn kernel_from_rref<F: Field, G: Fn(usize, usize) -> F>(cols: usize, pivots: &[usize], entry: G) -> Vec<Vec<F>> {
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols];
        for &p in pivots {
            v[p] = true;
        }
        v
    };
    let mut basis = Vec::new();
    for f in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![F::zero(); cols];
        v[f] = F::one();
        for (i, &p) in pivots.iter().enumerate() {
            let e = entry(i, f);
            if !e.is_zero() {
                v[p] = -e;
            }
        }
        basis.push(v);
    }
    basis
}

type SparseRow = Vec<(usize, BigRational)>;

/// Incremental row echelon form over ℚ with sparse rows.
#[derive(Clone, Debug, Default)]
pub struct SparseEchelon {
    cols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(row: &SparseRow, factor: &BigRational, pivot: &SparseRow) -> SparseRow {
    // row − factor · pivot
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < pivot.len() {
        match (row.get(i), pivot.get(j)) {
            (Some((ci, vi)), Some((cj, vj))) if ci == cj => {
                let v = vi - factor * vj;
                if !v.is_zero() {
                    out.push((*ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ci, vi)), Some((cj, _))) if ci < cj => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (Some((ci, vi)), None) => {
                out.push((*ci, vi.clone()));
                i += 1;
            }
            (_, Some((cj, vj))) => {
                out.push((*cj, -(factor * vj)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

impl SparseEchelon {
    pub fn new(cols: usize) -> Self {
        SparseEchelon { cols, pivots: BTreeMap::new() }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduce `row` against the current pivots; keep it if independent. Returns whether the rank grew.
    pub fn insert(&mut self, row: BTreeMap<usize, BigRational>) -> bool {
        let mut row: SparseRow = row.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        loop {
            let Some((lead, val)) = row.first().cloned() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => row = axpy(&row, &val, p),
                None => {
                    let inv = BigRational::one() / val;
                    for e in row.iter_mut() {
                        e.1 = &e.1 * &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Kernel basis of the inserted system, one vector per free column (ascending).
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let reduced = self.reduced_rows();
        let pivots: Vec<usize> = reduced.keys().copied().collect();
        let rows: Vec<&SparseRow> = reduced.values().collect();
        kernel_from_rref(self.cols, &pivots, |i, f| {
            rows[i].iter().find(|(c, _)| *c == f).map(|(_, v)| v.clone()).unwrap_or_else(BigRational::zero)
        })
    }

    fn reduced_rows(&self) -> BTreeMap<usize, SparseRow> {
        let mut done: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (&lead, row) in self.pivots.iter().rev() {
            let mut r = row.clone();
            loop {
                let hit = r.iter().skip(1).find(|(c, _)| done.contains_key(c)).cloned();
                match hit {
                    Some((c, v)) => r = axpy(&r, &v, &done[&c]),
                    None => break,
                }
            }
            done.insert(lead, r);
        }
        done
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Scalar};
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        rat(n, 1)
    }

    #[test]
    fn rank_and_kernel() {
        let m = Matrix::from_rows(vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(1), q(0), q(1)]]);
        assert_eq!(m.rank(), 2);
        let k = m.nullspace();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(Zero::is_zero));
    }

    #[test]
    fn complex_inverse() {
        let i = Scalar::i();
        let m = Matrix::from_rows(vec![vec![Scalar::from(1), i.clone()], vec![-i.clone(), Scalar::from(2)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(2));
        let singular = Matrix::from_rows(vec![vec![Scalar::from(1), i.clone()], vec![-i.clone(), Scalar::from(1)]]);
        assert!(singular.inverse().is_none());
    }

    #[test]
    fn solve_inconsistent() {
        let m = Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(2), q(2)]]);
        assert!(m.solve(&[q(1), q(3)]).is_none());
        assert_eq!(m.solve(&[q(1), q(2)]), Some(vec![q(1), q(0)]));
    }

    fn dense_from(rows: &[Vec<i64>]) -> Matrix<BigRational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    proptest! {
        #[test]
        fn sparse_matches_dense(rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 6), 1..8)) {
            let dense = dense_from(&rows);
            let mut sp = SparseEchelon::new(6);
            for r in &rows {
                sp.insert(r.iter().enumerate().filter(|(_, v)| **v != 0).map(|(c, v)| (c, q(*v))).collect());
            }
            prop_assert_eq!(sp.rank(), dense.rank());
            prop_assert_eq!(sp.kernel(), dense.nullspace());
        }

        #[test]
        fn rank_factorization_reconstructs(rows in proptest::collection::vec(proptest::collection::vec(-3i64..4, 4), 1..5)) {
            let m = dense_from(&rows);
            let (l, r) = m.rank_factorization();
            prop_assert_eq!(l.mul(&r), m.clone());
            prop_assert_eq!(l.cols(), m.rank());
        }
    }
}
