//! Hermitian coefficient forms `P = Σ K_ij e_i conj(e_j)` over a basis of holomorphic polynomials.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use crate::algebra::{Monomial, Scalar, SparsePoly, Weight};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `P = Σ_ij K_ij e_i conj(e_j)` with `e` a basis of the holomorphic span `W` of `P`.
#[derive(Clone, Debug)]
pub struct HermitianForm {
    pub basis: Vec<SparsePoly>,
    pub k: Matrix<Scalar>,
    /// Monomials indexing the coefficient vectors of the basis.
    monos: Vec<Monomial>,
    /// Coefficient matrix of the basis (rows = `monos`, columns = basis elements).
    coeffs: Matrix<Scalar>,
}

fn holo_of(m: &Monomial, beta: bool) -> Monomial {
    Monomial::holo(if beta { m.beta.clone() } else { m.alpha.clone() }, 0)
}

impl HermitianForm {
    /// Build the form from the coefficient matrix `C[α][β]` of a `w`-free real `P`.
    pub fn of(p: &SparsePoly) -> Result<HermitianForm> {
        let n = p.nvars();
        let rows: Vec<Monomial> = p.terms().map(|(m, _)| holo_of(m, false)).collect::<BTreeSet<_>>().into_iter().collect();
        let cols: Vec<Monomial> = p.terms().map(|(m, _)| holo_of(m, true)).collect::<BTreeSet<_>>().into_iter().collect();
        let mut c = Matrix::zeros(rows.len(), cols.len());
        for (m, v) in p.terms() {
            let i = rows.binary_search(&holo_of(m, false)).unwrap();
            let j = cols.binary_search(&holo_of(m, true)).unwrap();
            c.set(i, j, v.clone());
        }
        if rows.is_empty() {
            return Ok(HermitianForm { basis: Vec::new(), k: Matrix::zeros(0, 0), monos: Vec::new(), coeffs: Matrix::zeros(0, 0) });
        }
        let (left, right) = c.rank_factorization();
        let r = left.cols();
        let basis: Vec<SparsePoly> =
            (0..r).map(|k| SparsePoly::from_terms(n, rows.iter().enumerate().map(|(i, m)| (m.clone(), left.get(i, k).clone())))).collect();
        let mut form = HermitianForm { basis, k: Matrix::zeros(r, r), monos: rows, coeffs: left };
        // P = Σ_k e_k conj(q_k) with q_k = Σ_β conj(R_kβ) z^β; write q_k = Σ_l X_lk e_l.
        let mut k = Matrix::zeros(r, r);
        for kk in 0..r {
            let q = SparsePoly::from_terms(n, cols.iter().enumerate().map(|(j, m)| (m.clone(), right.get(kk, j).conj())));
            let x = form.coords(&q).ok_or_else(|| Error::InternalRankDrop("antiholomorphic factor outside the holomorphic span".into()))?;
            for (l, v) in x.iter().enumerate() {
                k.set(kk, l, v.conj());
            }
        }
        if k.conj_transpose() != k {
            return Err(Error::NotReal);
        }
        form.k = k;
        Ok(form)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `q` in the basis, if `q ∈ W`.
    pub fn coords(&self, q: &SparsePoly) -> Option<Vec<Scalar>> {
        if self.basis.is_empty() {
            return q.is_zero().then(Vec::new);
        }
        if q.terms().any(|(m, _)| self.monos.binary_search(m).is_err()) {
            return None;
        }
        let rhs: Vec<Scalar> = self.monos.iter().map(|m| q.coeff(m)).collect();
        self.coeffs.solve(&rhs)
    }

    /// `Σ v_i e_i`.
    pub fn combine(&self, v: &[Scalar]) -> SparsePoly {
        let n = self.basis.first().map_or(0, SparsePoly::nvars);
        let mut out = SparsePoly::zero(n);
        for (c, e) in v.iter().zip(&self.basis) {
            if !c.is_zero() {
                out = &out + &e.scale(c);
            }
        }
        out
    }

    /// `Σ K_ij e_i conj(e_j)`.
    pub fn expand(&self) -> SparsePoly {
        let n = self.basis.first().map_or(0, SparsePoly::nvars);
        let mut out = SparsePoly::zero(n);
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let c = self.k.get(i, j);
                if !c.is_zero() {
                    out = &out + &(&self.basis[i] * &self.basis[j].conjugate()).scale(c);
                }
            }
        }
        out
    }

    /// Holomorphic weight of each basis element.
    pub fn weights(&self, lambdas: &[Weight]) -> Vec<Weight> {
        self.basis.iter().map(|e| e.leading_term().map_or(Weight::zero(), |(m, _)| m.holo_weight(lambdas))).collect()
    }
}

/// `P_c = Σ_{j≤r} Q_j conj(Q̂_j)` with `r` the rank of the coefficient matrix of the
/// bihomogeneous component `P_c`.
pub fn minimal_factorization(p_c: &SparsePoly, lambdas: &[Weight]) -> Result<(Vec<SparsePoly>, Vec<SparsePoly>)> {
    let mut ws = p_c.terms().map(|(m, _)| m.holo_weight(lambdas));
    if let Some(first) = ws.next() {
        if ws.any(|w| w != first) {
            return Err(Error::NotBihomogeneous);
        }
    }
    if !p_c.is_w_free() {
        return Err(Error::DependsOnW);
    }
    let n = p_c.nvars();
    let rows: Vec<Monomial> = p_c.terms().map(|(m, _)| holo_of(m, false)).collect::<BTreeSet<_>>().into_iter().collect();
    let cols: Vec<Monomial> = p_c.terms().map(|(m, _)| holo_of(m, true)).collect::<BTreeSet<_>>().into_iter().collect();
    if rows.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut c = Matrix::zeros(rows.len(), cols.len());
    for (m, v) in p_c.terms() {
        c.set(rows.binary_search(&holo_of(m, false)).unwrap(), cols.binary_search(&holo_of(m, true)).unwrap(), v.clone());
    }
    let (left, right) = c.rank_factorization();
    let qs = (0..left.cols())
        .map(|k| SparsePoly::from_terms(n, rows.iter().enumerate().map(|(i, m)| (m.clone(), left.get(i, k).clone()))))
        .collect();
    let qhats = (0..right.rows())
        .map(|k| SparsePoly::from_terms(n, cols.iter().enumerate().map(|(j, m)| (m.clone(), right.get(k, j).conj()))))
        .collect();
    Ok((qs, qhats))
}

/// `Σ_j Q_j conj(Q̂_j)`.
pub fn expand_factorization(qs: &[SparsePoly], qhats: &[SparsePoly], n: usize) -> SparsePoly {
    qs.iter().zip(qhats).fold(SparsePoly::zero(n), |acc, (q, h)| &acc + &(q * &h.conjugate()))
}

/// Identity matrix over `ℚ(i)`.
pub fn eye(s: usize) -> Matrix<Scalar> {
    let mut m = Matrix::zeros(s, s);
    for i in 0..s {
        m.set(i, i, Scalar::one());
    }
    m
}
