//! Balanced polynomials and reproducing fields.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{exponents_of_weight, rat_int, rational_vec_str, Monomial, Scalar, SparsePoly, Weight};
use crate::linalg::Matrix;
use crate::model::ModelHypersurface;
use crate::tangency::VectorField;

/// Witness that every term of `P` has `|α|_{Λ'} = |β|_{Λ'} = 1`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct BalancedCertificate {
    #[serde(with = "rational_vec_str")]
    pub lambda_prime: Vec<BigRational>,
    /// `Σ λ'_j z_j ∂_{z_j}`.
    pub y0: VectorField,
}

impl BalancedCertificate {
    /// `Y0(P) = P` and the exponent identities hold.
    pub fn check(&self, p: &SparsePoly) -> bool {
        let dot = |e: &[u32]| e.iter().zip(&self.lambda_prime).fold(BigRational::zero(), |acc, (&k, l)| acc + rat_int(k as i64) * l);
        p.terms().all(|(m, _)| dot(&m.alpha).is_one() && dot(&m.beta).is_one()) && self.y0.apply(p) == *p
    }
}

/// Solve `Σ α_i λ'_i = 1 = Σ β_i λ'_i` over every term; free unknowns are set to zero.
pub fn balanced_weights(p: &SparsePoly) -> Option<Vec<BigRational>> {
    let n = p.nvars();
    let mut rows = Vec::new();
    for (m, _) in p.terms() {
        for e in [&m.alpha, &m.beta] {
            let row: Vec<BigRational> = e.iter().map(|&k| rat_int(k as i64)).collect();
            if !rows.contains(&row) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return None;
    }
    let rhs = vec![BigRational::one(); rows.len()];
    debug_assert!(rows.iter().all(|r| r.len() == n));
    Matrix::from_rows(rows).solve(&rhs)
}

pub fn diagonal_field(lambda_prime: &[BigRational]) -> VectorField {
    let n = lambda_prime.len();
    let mut y = VectorField::zero(n, Weight::zero());
    for (j, l) in lambda_prime.iter().enumerate() {
        if !l.is_zero() {
            y.f[j] = SparsePoly::z(n, j).scale(&Scalar::real(l.clone()));
        }
    }
    y
}

pub fn balanced_test(m: &ModelHypersurface) -> Option<BalancedCertificate> {
    let lambda_prime = balanced_weights(&m.p)?;
    let y0 = diagonal_field(&lambda_prime);
    Some(BalancedCertificate { lambda_prime, y0 })
}

/// Independent route: a diagonal field `Σ c_j z_j ∂_{z_j}` with complex `c_j` and `Z(R) = R`,
/// found by matching coefficients of `Z(R) − R`.
pub fn diagonal_reproducing(r: &SparsePoly) -> Option<VectorField> {
    let n = r.nvars();
    let columns: Vec<SparsePoly> = (0..n).map(|j| &SparsePoly::z(n, j) * &r.partial(crate::algebra::Var::Z(j))).collect();
    let field = solve_columns(&columns, r)?;
    let mut y = VectorField::zero(n, Weight::zero());
    for (j, c) in field.into_iter().enumerate() {
        if !c.is_zero() {
            y.f[j] = SparsePoly::z(n, j).scale(&c);
        }
    }
    Some(y)
}

/// Solve `Σ c_k columns[k] = target` for complex `c_k`, free unknowns zero.
fn solve_columns(columns: &[SparsePoly], target: &SparsePoly) -> Option<Vec<Scalar>> {
    let mut monos: Vec<Monomial> = target.terms().map(|(m, _)| m.clone()).collect();
    for c in columns {
        monos.extend(c.terms().map(|(m, _)| m.clone()));
    }
    monos.sort();
    monos.dedup();
    if monos.is_empty() {
        return Some(vec![Scalar::zero(); columns.len()]);
    }
    let rows: Vec<Vec<Scalar>> = monos.iter().map(|m| columns.iter().map(|c| c.coeff(m)).collect()).collect();
    let rhs: Vec<Scalar> = monos.iter().map(|m| target.coeff(m)).collect();
    if columns.is_empty() {
        return rhs.iter().all(Zero::is_zero).then(Vec::new);
    }
    Matrix::from_rows(rows).solve(&rhs)
}

/// A holomorphic `w`-free field `Z` of weight `wt(S)` with `Z(R) = S·R`.
pub fn solve_reproducing(r: &SparsePoly, s: &SparsePoly, lambdas: &[Weight]) -> Option<VectorField> {
    let n = r.nvars();
    let weights: Vec<Weight> = s.terms().map(|(m, _)| m.weighted_degree(lambdas)).collect();
    let mu = weights.first().copied().unwrap_or_else(Weight::zero);
    if weights.iter().any(|w| *w != mu) || !s.is_holomorphic_type() {
        return None;
    }
    let mut slots: Vec<(usize, Monomial)> = Vec::new();
    for j in 0..n {
        for a in exponents_of_weight(lambdas, mu + lambdas[j]) {
            slots.push((j, Monomial::holo(a, 0)));
        }
    }
    let columns: Vec<SparsePoly> =
        slots.iter().map(|(j, mono)| r.partial(crate::algebra::Var::Z(*j)).mul_monomial(mono, &Scalar::one())).collect();
    let coeffs = solve_columns(&columns, &(s * r))?;
    let mut y = VectorField::zero(n, mu);
    for ((j, mono), c) in slots.into_iter().zip(coeffs) {
        if !c.is_zero() {
            y.f[j].add_term(mono, &c);
        }
    }
    Some(y)
}
