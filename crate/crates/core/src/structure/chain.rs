//! Symmetric pairs of chains for a generalized rotation.
//!
//! The holomorphic span `W` of `P` is invariant under a tangent generalized
//! rotation `Y`, which acts on it nilpotently. A graded Jordan basis of `Y|_W`
//! gives the `U`-chains; rewriting `P = Σ b_i conj(ψ_i)` in that basis gives the
//! partner `V`-chains, on which `Y` acts with the opposite sign.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::hermitian::{eye, HermitianForm};
use crate::algebra::{Scalar, SparsePoly, Weight};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::ModelHypersurface;
use crate::tangency::{residual_for, tangency_residual, VectorField};

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ChainPair {
    pub s: usize,
    pub l: usize,
    /// `U^{(1)}, …, U^{(l)}`, each a vector of `s` holomorphic polynomials.
    pub u: Vec<Vec<SparsePoly>>,
    pub v: Vec<Vec<SparsePoly>>,
    /// `A_1, …, A_{l−1}`.
    pub a: Vec<Matrix<Scalar>>,
    pub b: Vec<Matrix<Scalar>>,
}

impl ChainPair {
    /// `Re Σ_k ⟨U^{(k)}, V^{(l−k+1)}⟩` with `⟨a, b⟩ = Σ a_i conj(b_i)`.
    pub fn term(&self, n: usize) -> SparsePoly {
        let mut sum = SparsePoly::zero(n);
        for k in 0..self.l {
            for (a, b) in self.u[k].iter().zip(&self.v[self.l - 1 - k]) {
                sum = &sum + &(a * &b.conjugate());
            }
        }
        sum.real_part()
    }
}

#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct ChainDecomposition {
    pub field: VectorField,
    pub pairs: Vec<ChainPair>,
    /// `Σ_j T_j`, which must equal `P`.
    pub reconstruction: SparsePoly,
}

fn check_generalized_rotation(m: &ModelHypersurface, y: &VectorField) -> Result<()> {
    let reject = |why: &str| Err(Error::NotGeneralizedRotation(why.into()));
    if y.is_zero() {
        return reject("zero field");
    }
    if !y.is_rigid() {
        return reject("coefficients depend on w");
    }
    if y.weight <= Weight::zero() || y.weight >= Weight::one() {
        return reject("weight outside (0, 1)");
    }
    if !y.g.is_zero() {
        return reject("nonzero ∂w component");
    }
    match tangency_residual(y, m) {
        Ok(r) if r.is_zero() => Ok(()),
        Ok(_) => reject("not tangent to the model"),
        Err(e) => reject(&e.to_string()),
    }
}

/// Heads of a Jordan basis of the nilpotent `N` whose vectors are homogeneous for `weights`
/// (`N` raises weight by `step`). Returns `(head, chain length)` pairs, longest chains first.
fn graded_jordan_heads(n: &Matrix<Scalar>, weights: &[Weight], step: Weight) -> Result<Vec<(Vec<Scalar>, usize)>> {
    let r = n.rows();
    let mut powers = vec![Matrix::identity(r)];
    while !powers.last().unwrap().data_is_zero() {
        if powers.len() > r + 1 {
            return Err(Error::InternalRankDrop("rotation is not nilpotent on the holomorphic span".into()));
        }
        let next = n.mul(powers.last().unwrap());
        powers.push(next);
    }
    let max_len = powers.len() - 1;
    let mut distinct: Vec<Weight> = weights.to_vec();
    distinct.sort();
    distinct.dedup();
    let apply = |k: usize, v: &[Scalar]| powers[k].mul_vec(v);
    let mut heads: Vec<(Vec<Scalar>, usize, Weight)> = Vec::new();
    for len in (1..=max_len).rev() {
        for &c in &distinct {
            let idx: Vec<usize> = (0..r).filter(|&i| weights[i] == c).collect();
            let embed = |v: &[Scalar]| {
                let mut full = vec![Scalar::zero(); r];
                for (x, &i) in v.iter().zip(&idx) {
                    full[i] = x.clone();
                }
                full
            };
            let restricted = |k: usize| {
                let mut mat = Matrix::zeros(r, idx.len());
                for (jj, &j) in idx.iter().enumerate() {
                    for i in 0..r {
                        mat.set(i, jj, powers[k].get(i, j).clone());
                    }
                }
                mat
            };
            let kernel = |k: usize| -> Vec<Vec<Scalar>> {
                if k == 0 {
                    return Vec::new();
                }
                restricted(k).nullspace().iter().map(|v| embed(v)).collect()
            };
            let mut span: Vec<Vec<Scalar>> = kernel(len - 1);
            for (h, l, hw) in &heads {
                if *l > len && *hw + step * Weight::from_integer((*l - len) as i64) == c {
                    span.push(apply(l - len, h));
                }
            }
            let base_rank = if span.is_empty() { 0 } else { Matrix::from_rows(span.clone()).rank() };
            let mut current = base_rank;
            for x in kernel(len) {
                let mut trial = span.clone();
                trial.push(x.clone());
                let rank = Matrix::from_rows(trial.clone()).rank();
                if rank > current {
                    span = trial;
                    current = rank;
                    heads.push((x, len, c));
                }
            }
        }
    }
    let total: usize = heads.iter().map(|(_, l, _)| l).sum();
    if total != r {
        return Err(Error::InternalRankDrop(format!("Jordan basis has {total} vectors, span has dimension {r}")));
    }
    Ok(heads.into_iter().map(|(h, l, _)| (h, l)).collect())
}

trait ZeroCheck {
    fn data_is_zero(&self) -> bool;
}

impl ZeroCheck for Matrix<Scalar> {
    fn data_is_zero(&self) -> bool {
        (0..self.rows()).all(|i| self.row(i).iter().all(Zero::is_zero))
    }
}

/// Decompose `P` into symmetric pairs of `Y`-chains.
pub fn chain_decomposition(m: &ModelHypersurface, y: &VectorField) -> Result<ChainDecomposition> {
    check_generalized_rotation(m, y)?;
    let n = m.n;
    let form = HermitianForm::of(&m.p)?;
    let r = form.rank();
    let weights = form.weights(m.lambdas());

    // Matrix of Y on W: column i = coordinates of Y(e_i).
    let mut nmat = Matrix::zeros(r, r);
    for i in 0..r {
        let image = y.apply(&form.basis[i]);
        let x =
            form.coords(&image).ok_or_else(|| Error::InternalRankDrop("holomorphic span is not invariant under the rotation".into()))?;
        for (k, v) in x.into_iter().enumerate() {
            nmat.set(k, i, v);
        }
    }
    let heads = graded_jordan_heads(&nmat, &weights, y.weight)?;

    // New basis b (columns of T) in chain order; remember (chain, position).
    let mut columns: Vec<Vec<Scalar>> = Vec::new();
    let mut chains: Vec<(usize, Weight, Vec<usize>)> = Vec::new();
    for (h, len) in &heads {
        let mut idx = Vec::new();
        let mut v = h.clone();
        for _ in 0..*len {
            idx.push(columns.len());
            columns.push(v.clone());
            v = nmat.mul_vec(&v);
        }
        let head_weight = weights[h.iter().position(|c| !c.is_zero()).unwrap()];
        chains.push((*len, head_weight, idx));
    }
    let mut t = Matrix::zeros(r, r);
    for (j, col) in columns.iter().enumerate() {
        for (i, x) in col.iter().enumerate().take(r) {
            t.set(i, j, x.clone());
        }
    }
    let t_inv = t.inverse().ok_or_else(|| Error::InternalRankDrop("Jordan basis is singular".into()))?;
    let h = t_inv.mul(&form.k).mul(&t_inv.conj_transpose());
    let b_poly: Vec<SparsePoly> = columns.iter().map(|c| form.combine(c)).collect();
    // ψ_i = Σ_j conj(H_ij) b_j, so that P = Σ_i b_i conj(ψ_i).
    let psi: Vec<SparsePoly> = (0..r)
        .map(|i| {
            (0..r).fold(SparsePoly::zero(n), |acc, j| {
                let c = h.get(i, j).conj();
                if c.is_zero() {
                    acc
                } else {
                    &acc + &b_poly[j].scale(&c)
                }
            })
        })
        .collect();

    // Group chains by (length, head weight).
    let mut groups: BTreeMap<(std::cmp::Reverse<usize>, Weight), Vec<Vec<usize>>> = BTreeMap::new();
    for (len, w, idx) in chains {
        groups.entry((std::cmp::Reverse(len), w)).or_default().push(idx);
    }
    let mut pairs = Vec::new();
    let mut remainder = m.p.clone();
    for ((std::cmp::Reverse(len), _), members) in groups {
        let s = members.len();
        let u: Vec<Vec<SparsePoly>> = (0..len).map(|k| members.iter().map(|c| b_poly[c[k]].clone()).collect()).collect();
        let v: Vec<Vec<SparsePoly>> = (0..len).map(|j| members.iter().map(|c| psi[c[len - 1 - j]].clone()).collect()).collect();
        let pair = ChainPair { s, l: len, u, v, a: vec![eye(s); len - 1], b: vec![eye(s).neg(); len - 1] };
        remainder = &remainder - &pair.term(n);
        if !residual_for(y, &remainder).is_zero() {
            return Err(Error::InternalRankDrop("remainder lost tangency after extracting a chain pair".into()));
        }
        pairs.push(pair);
    }
    if !remainder.is_zero() {
        return Err(Error::InternalRankDrop("chain pairs do not exhaust P".into()));
    }
    let reconstruction = pairs.iter().fold(SparsePoly::zero(n), |acc, p| &acc + &p.term(n));
    Ok(ChainDecomposition { field: y.clone(), pairs, reconstruction })
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ChainVerification {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn apply_vec(y: &VectorField, v: &[SparsePoly]) -> Vec<SparsePoly> {
    v.iter().map(|p| y.apply(p)).collect()
}

fn mat_vec(a: &Matrix<Scalar>, v: &[SparsePoly]) -> Vec<SparsePoly> {
    let n = v.first().map_or(0, SparsePoly::nvars);
    (0..a.rows())
        .map(|i| {
            v.iter().enumerate().fold(SparsePoly::zero(n), |acc, (j, p)| {
                let c = a.get(i, j);
                if c.is_zero() {
                    acc
                } else {
                    &acc + &p.scale(c)
                }
            })
        })
        .collect()
}

/// Check every chain relation, the symmetry `A_j = −B_{l−j}^*`, invertibility,
/// exact reconstruction of `P`, and tangency of `Y`.
pub fn verify_chain(m: &ModelHypersurface, y: &VectorField, d: &ChainDecomposition) -> ChainVerification {
    let mut bad = Vec::new();
    match tangency_residual(y, m) {
        Ok(r) if r.is_zero() => {}
        _ => bad.push("field is not tangent to the model".to_string()),
    }
    let n = m.n;
    for (pi, pair) in d.pairs.iter().enumerate() {
        let tag = format!("pair {}", pi + 1);
        let l = pair.l;
        if pair.u.len() != l || pair.v.len() != l || pair.a.len() + 1 != l || pair.b.len() + 1 != l {
            bad.push(format!("{tag}: inconsistent chain length"));
            continue;
        }
        if pair.u.iter().chain(&pair.v).any(|x| x.len() != pair.s) {
            bad.push(format!("{tag}: vector width differs from s"));
            continue;
        }
        for (name, chain, mats) in [("U", &pair.u, &pair.a), ("V", &pair.v, &pair.b)] {
            for j in 0..l {
                let lhs = apply_vec(y, &chain[j]);
                let rhs = if j + 1 < l { mat_vec(&mats[j], &chain[j + 1]) } else { vec![SparsePoly::zero(n); pair.s] };
                if lhs != rhs {
                    bad.push(format!("{tag}: Y({name}^({})) relation fails", j + 1));
                }
            }
            for (j, a) in mats.iter().enumerate() {
                if !a.is_invertible() {
                    bad.push(format!("{tag}: matrix {} of {name} is singular", j + 1));
                }
            }
        }
        for j in 0..l.saturating_sub(1) {
            if pair.a[j] != pair.b[l - 2 - j].conj_transpose().neg() {
                bad.push(format!("{tag}: A_{} ≠ −B_{}^*", j + 1, l - 1 - j));
            }
        }
    }
    let total = d.pairs.iter().fold(SparsePoly::zero(n), |acc, p| &acc + &p.term(n));
    if total != m.p {
        bad.push("pairs do not reconstruct P".to_string());
    }
    if d.reconstruction != total {
        bad.push("recorded reconstruction differs from the pairs".to_string());
    }
    ChainVerification { ok: bad.is_empty(), violations: bad }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_model, WeightVector};

    fn re_cubic() -> (ModelHypersurface, VectorField) {
        let t = &SparsePoly::z(2, 0) * &SparsePoly::zbar(2, 1).pow(3);
        let p = (&t + &t.conjugate()).scale(&Scalar::from_frac(1, 2));
        let m = validate_model(&p, &WeightVector::new(vec![Weight::new(1, 4); 2])).unwrap();
        let mut y = VectorField::zero(2, Weight::new(1, 2));
        y.f[0] = SparsePoly::z(2, 1).pow(3).scale(&Scalar::i());
        (m, y)
    }

    #[test]
    fn cubic_chain() {
        let (m, y) = re_cubic();
        let d = chain_decomposition(&m, &y).unwrap();
        assert_eq!(d.pairs.len(), 1);
        assert_eq!((d.pairs[0].s, d.pairs[0].l), (1, 2));
        let v = verify_chain(&m, &y, &d);
        assert!(v.ok, "{:?}", v.violations);
    }

    #[test]
    fn tampering_detected() {
        let (m, y) = re_cubic();
        let mut d = chain_decomposition(&m, &y).unwrap();
        d.pairs[0].a[0].set(0, 0, Scalar::from(2));
        let v = verify_chain(&m, &y, &d);
        assert!(!v.ok);
        assert!(v.violations.iter().any(|s| s.contains("A_1")));
        let empty = ChainDecomposition { field: y.clone(), pairs: Vec::new(), reconstruction: SparsePoly::zero(2) };
        assert!(!verify_chain(&m, &y, &empty).ok);
    }

    #[test]
    fn rejects_non_rotation() {
        let p = &SparsePoly::z(1, 0) * &SparsePoly::zbar(1, 0);
        let m = validate_model(&p, &WeightVector::new(vec![Weight::new(1, 2)])).unwrap();
        let y = VectorField::zero(1, Weight::new(1, 2));
        assert!(matches!(chain_decomposition(&m, &y), Err(Error::NotGeneralizedRotation(_))));
    }
}
