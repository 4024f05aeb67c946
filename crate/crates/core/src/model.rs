//! Model hypersurfaces `{Im w = P(z, z̄)}`: validation, weight inference and
//! holomorphic nondegeneracy.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{
    exponents_of_weight, rat, weight_to_string, weight_vec_str, weighted_components, Monomial, Scalar, SparsePoly, Var, Weight,
};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::tangency::VectorField;

/// Weight bound used when none is given for the nondegeneracy search.
pub const DEFAULT_DEGENERACY_BOUND: Weight = Weight::new_raw(1, 1);

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector {
    #[serde(with = "weight_vec_str")]
    pub lambdas: Vec<Weight>,
}

impl WeightVector {
    pub fn new(lambdas: Vec<Weight>) -> Self {
        WeightVector { lambdas }
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// Enforce `0 < λ_j ≤ 1/2` and `λ_j ≥ λ_{j+1}`.
    pub fn check(&self) -> Result<()> {
        let half = Weight::new(1, 2);
        for (j, l) in self.lambdas.iter().enumerate() {
            if *l <= Weight::zero() || *l > half {
                return Err(Error::WeightOutOfRange(format!("λ_{} = {} is outside (0, 1/2]", j + 1, weight_to_string(l))));
            }
        }
        for j in 1..self.lambdas.len() {
            if self.lambdas[j] > self.lambdas[j - 1] {
                return Err(Error::WeightOutOfRange(format!(
                    "λ_{} = {} exceeds λ_{} = {}",
                    j + 1,
                    weight_to_string(&self.lambdas[j]),
                    j,
                    weight_to_string(&self.lambdas[j - 1])
                )));
            }
        }
        Ok(())
    }

    /// All weights equal.
    pub fn is_uniform(&self) -> bool {
        self.lambdas.windows(2).all(|w| w[0] == w[1])
    }
}

impl std::fmt::Display for WeightVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.lambdas.iter().map(weight_to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A validated model `{Im w = P}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ModelHypersurface {
    pub n: usize,
    pub weights: WeightVector,
    pub p: SparsePoly,
}

impl ModelHypersurface {
    pub fn lambdas(&self) -> &[Weight] {
        &self.weights.lambdas
    }
}

pub fn validate_model(p: &SparsePoly, weights: &WeightVector) -> Result<ModelHypersurface> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if weights.len() != p.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), found: weights.len() });
    }
    weights.check()?;
    if !p.is_w_free() {
        return Err(Error::DependsOnW);
    }
    let (_, harmonic) = strip_pluriharmonic(p);
    if !harmonic.is_zero() {
        return Err(Error::HasPluriharmonicTerms(
            harmonic.terms().map(|(m, c)| SparsePoly::term(m.clone(), c.clone()).to_string()).collect(),
        ));
    }
    if !p.is_real_type() {
        return Err(Error::NotReal);
    }
    let parts = weighted_components(p, &weights.lambdas);
    let one = Weight::from_integer(1);
    let off: Vec<String> = parts.iter().filter(|(w, _)| *w != one).map(|(w, _)| weight_to_string(w)).collect();
    if !off.is_empty() {
        return Err(Error::NotHomogeneous(off));
    }
    Ok(ModelHypersurface { n: p.nvars(), weights: weights.clone(), p: p.clone() })
}

/// Split `P = P' + H` with `H` the pluriharmonic terms (`α = 0` or `β = 0`).
pub fn strip_pluriharmonic(p: &SparsePoly) -> (SparsePoly, SparsePoly) {
    let (h, rest) = p.partition(Monomial::is_pluriharmonic);
    (rest, h)
}

/// Vertices of `{Σ(α_i+β_i)λ_i = 1 for every term} ∩ {λ_1 ≤ 1/2, λ_j ≥ λ_{j+1}, λ_n > 0}`,
/// sorted lexicographically.
pub fn infer_weights(p: &SparsePoly) -> Result<Vec<WeightVector>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let n = p.nvars();
    let mut eqs: Vec<Vec<BigRational>> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (m, _) in p.terms() {
        let row: Vec<u32> = (0..n).map(|i| m.alpha[i] + m.beta[i]).collect();
        if m.p + m.q > 0 {
            return Err(Error::DependsOnW);
        }
        if seen.insert(row.clone()) {
            eqs.push(row.iter().map(|&e| rat(e as i64, 1)).collect());
        }
    }
    // Inequalities as (row, bound) meaning row·λ ≤ bound.
    let mut ineqs: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    let mut first = vec![BigRational::zero(); n];
    first[0] = rat(1, 1);
    ineqs.push((first, rat(1, 2)));
    for j in 0..n.saturating_sub(1) {
        let mut r = vec![BigRational::zero(); n];
        r[j + 1] = rat(1, 1);
        r[j] = rat(-1, 1);
        ineqs.push((r, BigRational::zero()));
    }
    let mut last = vec![BigRational::zero(); n];
    last[n - 1] = rat(-1, 1);
    ineqs.push((last, BigRational::zero()));

    let mut found = std::collections::BTreeSet::new();
    for mask in 0u64..(1u64 << ineqs.len()) {
        let mut rows = eqs.clone();
        let mut rhs = vec![rat(1, 1); eqs.len()];
        for (k, (r, b)) in ineqs.iter().enumerate() {
            if mask & (1 << k) != 0 {
                rows.push(r.clone());
                rhs.push(b.clone());
            }
        }
        let a = Matrix::from_rows(rows);
        if a.rank() < n {
            continue;
        }
        let Some(x) = a.solve(&rhs) else { continue };
        let feasible = ineqs.iter().all(|(r, b)| r.iter().zip(&x).fold(BigRational::zero(), |acc, (c, v)| acc + c * v) <= *b)
            && x[n - 1] > BigRational::zero();
        if !feasible {
            continue;
        }
        let lambdas: Option<Vec<Weight>> = x.iter().map(|v| Some(Weight::new(v.numer().to_i64()?, v.denom().to_i64()?))).collect();
        if let Some(l) = lambdas {
            found.insert(l);
        }
    }
    Ok(found.into_iter().map(WeightVector::new).collect())
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NondegeneracyVerdict {
    NondegenerateUpTo {
        #[serde(with = "crate::algebra::weight_str")]
        bound: Weight,
    },
    Degenerate {
        witness: VectorField,
    },
}

impl NondegeneracyVerdict {
    pub fn is_degenerate(&self) -> bool {
        matches!(self, NondegeneracyVerdict::Degenerate { .. })
    }
}

/// Weights `μ ≤ bound` admitting a nonzero field `Σ a_j(z) ∂_{z_j}`, ascending.
fn holomorphic_field_weights(lambdas: &[Weight], bound: Weight) -> Vec<Weight> {
    let mut sums = std::collections::BTreeSet::new();
    let top = bound + lambdas.iter().copied().max().unwrap_or_default();
    let mut frontier = vec![Weight::zero()];
    sums.insert(Weight::zero());
    while let Some(s) = frontier.pop() {
        for l in lambdas {
            let t = s + l;
            if t <= top && sums.insert(t) {
                frontier.push(t);
            }
        }
    }
    let mut out = std::collections::BTreeSet::new();
    for s in &sums {
        for l in lambdas {
            let mu = s - l;
            if mu <= bound {
                out.insert(mu);
            }
        }
    }
    out.into_iter().collect()
}

/// Search for `X = Σ a_j(z) ∂_{z_j} ≠ 0` with `Σ a_j ∂P/∂z_j ≡ 0`, weight by weight up to `max_weight`.
pub fn is_holomorphically_nondegenerate(m: &ModelHypersurface, max_weight: Weight) -> NondegeneracyVerdict {
    let n = m.n;
    let lambdas = m.lambdas();
    let derivs: Vec<SparsePoly> = (0..n).map(|j| m.p.partial(Var::Z(j))).collect();
    for mu in holomorphic_field_weights(lambdas, max_weight) {
        let mut unknowns: Vec<(usize, Monomial)> = Vec::new();
        for j in 0..n {
            for a in exponents_of_weight(lambdas, mu + lambdas[j]) {
                unknowns.push((j, Monomial::holo(a, 0)));
            }
        }
        if unknowns.is_empty() {
            continue;
        }
        let mut rows: BTreeMap<Monomial, Vec<Scalar>> = BTreeMap::new();
        for (col, (j, mono)) in unknowns.iter().enumerate() {
            let image = derivs[*j].mul_monomial(mono, &Scalar::from(1));
            for (t, c) in image.terms() {
                rows.entry(t.clone()).or_insert_with(|| vec![Scalar::zero(); unknowns.len()])[col] = c.clone();
            }
        }
        let mat = Matrix::from_rows(rows.into_values().collect());
        let kernel = if mat.rows() == 0 {
            (0..unknowns.len())
                .map(|k| (0..unknowns.len()).map(|i| if i == k { Scalar::from(1) } else { Scalar::zero() }).collect())
                .collect()
        } else {
            mat.nullspace()
        };
        if let Some(v) = kernel.into_iter().next() {
            let lead = v.iter().find(|c| !c.is_zero()).cloned().expect("kernel vector is nonzero");
            let mut x = VectorField::zero(n, mu);
            for ((j, mono), c) in unknowns.iter().zip(&v) {
                if !c.is_zero() {
                    x.f[*j].add_term(mono.clone(), &(c / &lead));
                }
            }
            return NondegeneracyVerdict::Degenerate { witness: x };
        }
    }
    NondegeneracyVerdict::NondegenerateUpTo { bound: max_weight }
}

/// `Σ a_j ∂P/∂z_j` for a witness field.
pub fn degeneracy_residual(m: &ModelHypersurface, x: &VectorField) -> SparsePoly {
    x.apply(&m.p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wv(ws: &[(i64, i64)]) -> WeightVector {
        WeightVector::new(ws.iter().map(|&(a, b)| Weight::new(a, b)).collect())
    }

    fn abs2(n: usize, j: usize) -> SparsePoly {
        &SparsePoly::z(n, j) * &SparsePoly::zbar(n, j)
    }

    fn re_cubic() -> SparsePoly {
        let t = &SparsePoly::z(2, 0) * &SparsePoly::zbar(2, 1).pow(3);
        (&t + &t.conjugate()).scale(&Scalar::from_frac(1, 2))
    }

    #[test]
    fn validation() {
        assert!(validate_model(&abs2(1, 0), &wv(&[(1, 2)])).is_ok());
        let z3 = SparsePoly::z(1, 0).pow(3);
        let ph = &z3 + &z3.conjugate();
        assert!(matches!(validate_model(&ph, &wv(&[(1, 3)])), Err(Error::HasPluriharmonicTerms(_))));
        assert!(validate_model(&re_cubic(), &wv(&[(1, 4), (1, 4)])).is_ok());
        assert!(matches!(validate_model(&re_cubic(), &wv(&[(1, 2), (1, 4)])), Err(Error::NotHomogeneous(_))));
        assert_eq!(validate_model(&SparsePoly::zero(1), &wv(&[(1, 2)])), Err(Error::ZeroPolynomial));
        let nonreal = &SparsePoly::z(1, 0) * &SparsePoly::zbar(1, 0).scale(&Scalar::i());
        assert_eq!(validate_model(&nonreal, &wv(&[(1, 2)])), Err(Error::NotReal));
        assert!(matches!(validate_model(&abs2(1, 0), &wv(&[(2, 3)])), Err(Error::WeightOutOfRange(_))));
    }

    #[test]
    fn weights_inferred() {
        assert_eq!(infer_weights(&abs2(1, 0)).unwrap(), vec![wv(&[(1, 2)])]);
        assert_eq!(infer_weights(&re_cubic()).unwrap(), vec![wv(&[(1, 4), (1, 4)]), wv(&[(1, 2), (1, 6)])]);
        assert_eq!(infer_weights(&SparsePoly::zero(1)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn stripping() {
        let z3 = SparsePoly::z(1, 0).pow(3);
        let re = (&z3 + &z3.conjugate()).scale(&Scalar::from_frac(1, 2));
        let p = &abs2(1, 0) + &re;
        assert_eq!(strip_pluriharmonic(&p), (abs2(1, 0), re));
        assert_eq!(strip_pluriharmonic(&re_cubic()), (re_cubic(), SparsePoly::zero(2)));
    }

    #[test]
    fn degenerate_witness() {
        let p = &abs2(2, 0) * &abs2(2, 1);
        let m = validate_model(&p, &wv(&[(1, 4), (1, 4)])).unwrap();
        match is_holomorphically_nondegenerate(&m, DEFAULT_DEGENERACY_BOUND) {
            NondegeneracyVerdict::Degenerate { witness } => {
                assert!(degeneracy_residual(&m, &witness).is_zero());
                assert_eq!(witness.f[0], SparsePoly::z(2, 0));
                assert_eq!(witness.f[1], SparsePoly::z(2, 1).scale(&Scalar::from(-1)));
            }
            v => panic!("expected degenerate, got {v:?}"),
        }
        let sphere = validate_model(&(&abs2(2, 0) + &abs2(2, 1)), &wv(&[(1, 2), (1, 2)])).unwrap();
        assert!(!is_holomorphically_nondegenerate(&sphere, Weight::from_integer(2)).is_degenerate());
        let re_cubic = validate_model(&re_cubic(), &wv(&[(1, 4), (1, 4)])).unwrap();
        assert!(!is_holomorphically_nondegenerate(&re_cubic, DEFAULT_DEGENERACY_BOUND).is_degenerate());
    }
}
